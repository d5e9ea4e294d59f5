#include "vrabi/curves.hpp"

#include <cmath>

#include "vrabi/errors.hpp"

namespace vrabi {

std::vector<double> time_grid(double start, double end, double step) {
  if (!(step > 0.0)) throw ValidationError("time grid: step must be > 0");
  if (!(end > start)) throw ValidationError("time grid: end must exceed start");
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step * (1.0 + 1e-9))) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

std::vector<double> nstep_pg_curve(const ModelKind& kind, const PhysicalParams& p, const CouplingProfile& profile,
                                   const std::vector<double>& times, std::size_t n, Execution exec) {
  const DensityMatrix rho0 = excited_state(native_basis(kind));
  return tabulate(
      times,
      [&](double t) { return ground_probability(nstep_propagate(kind, p, profile, rho0, t, n)); },
      exec);
}

std::vector<double> opencavity_pg_curve(const OpenCavityParams& oc, const PhysicalParams& p,
                                        const CouplingProfile& profile, const std::vector<double>& times,
                                        Execution exec) {
  return tabulate(times, [&](double t) { return opencavity_pg(oc, p, t, profile).value; }, exec);
}

std::vector<double> convolved_pg_curve(const OpenCavityParams& oc, const PhysicalParams& p,
                                       const CouplingProfile& profile, double delta_t,
                                       const std::vector<double>& times, Execution exec) {
  return tabulate(times, [&](double t) { return convolve_pg(oc, p, profile, delta_t, t).value; }, exec);
}

std::vector<double> quadrature_pg_curve(const OpenCavityParams& oc, const PhysicalParams& p,
                                        const CouplingProfile& profile, double delta_t,
                                        const std::vector<double>& times, Execution exec) {
  const auto f = [&](double s) { return opencavity_pg(oc, p, s, profile).value; };
  return tabulate(
      times, [&](double t) { return t == 0.0 || delta_t == 0.0 ? f(t) : convolve_numeric(f, t, delta_t); }, exec);
}

}  // namespace vrabi
