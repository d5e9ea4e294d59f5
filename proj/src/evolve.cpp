#include "vrabi/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vrabi/errors.hpp"

namespace vrabi {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double inf_norm(const ComplexMatrix& a) {
  double n = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) row += std::abs(a(i, j));
    n = std::max(n, row);
  }
  return n;
}

void record_hygiene(const SuperVector& y, Basis basis, TrajectoryStats& s) {
  const DensityMatrix d = DensityMatrix::unchecked(unvectorize(y), basis);
  s.max_trace_drift = std::max(s.max_trace_drift, d.trace_drift());
  const double herm = d.hermiticity_defect();
  s.max_hermiticity_defect = std::max(s.max_hermiticity_defect, herm);
  s.min_eigenvalue = std::min(s.min_eigenvalue, d.min_eigenvalue());
}

}  // namespace

Trajectory integrate(const GeneratorAt& generator, const std::string& model, const DensityMatrix& rho0, double t_end,
                     const IntegrateOptions& opt) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("integrate: t_end must be finite and >= 0");
  if (rho0.dim() != 3) throw ValidationError("integrate: expected a 3-level state");
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw ValidationError("integrate: tolerances must be > 0");
  std::vector<double> outs = opt.output_times.empty() ? std::vector<double>{0.0, t_end} : opt.output_times;
  for (std::size_t k = 0; k < outs.size(); ++k) {
    if (outs[k] < 0.0 || outs[k] > t_end) throw ValidationError("integrate: output time outside [0, t_end]");
    if (k > 0 && !(outs[k] > outs[k - 1])) throw ValidationError("integrate: output times must increase strictly");
  }

  Trajectory traj;
  traj.model = model;
  const Basis basis = rho0.basis();
  SuperVector y = vectorize(rho0.matrix());
  record_hygiene(y, basis, traj.stats);

  std::size_t next = 0;
  auto emit = [&](double t) {
    while (next < outs.size() && outs[next] <= t) {
      traj.times.push_back(outs[next]);
      traj.states.push_back(DensityMatrix::unchecked(unvectorize(y), basis));
      ++next;
    }
  };
  emit(0.0);
  if (next == outs.size()) return traj;

  ComplexMatrix l(9);
  generator(0.0, l);
  double h = std::min(t_end, 0.01 / std::max(inf_norm(l), 1e-300));
  SuperVector k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
  apply(l, y, k1);
  double t = 0.0;

  auto stage = [&](double ts, SuperVector& k) {
    generator(ts, l);
    apply(l, tmp, k);
  };

  std::size_t steps = 0;
  while (next < outs.size()) {
    const double target = outs[next];
    if (++steps > opt.max_steps) throw IntegrationError("integrate: step budget exhausted", t);
    bool hit = false;
    double hs = h;
    if (t + hs >= target) {
      hs = target - t;
      hit = true;
    }
    if (hs < 1e-14 * std::max(std::abs(t), t_end)) throw IntegrationError("integrate: step size underflow", t);

    for (int i = 0; i < 9; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    stage(t + c2 * hs, k2);
    for (int i = 0; i < 9; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    stage(t + c3 * hs, k3);
    for (int i = 0; i < 9; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    stage(t + c4 * hs, k4);
    for (int i = 0; i < 9; ++i) tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    stage(t + c5 * hs, k5);
    for (int i = 0; i < 9; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    stage(t + hs, k6);
    for (int i = 0; i < 9; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    tmp = ynew;
    stage(t + hs, k7);

    double err = 0.0;
    for (int i = 0; i < 9; ++i) {
      const cplx e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei = std::abs(e) / sc;
      err = std::isfinite(ei) ? std::max(err, ei) : std::numeric_limits<double>::infinity();
    }

    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      t = hit ? target : t + hs;
      y = ynew;
      k1 = k7;
      ++traj.stats.accepted;
      record_hygiene(y, basis, traj.stats);
      emit(t);
      // A step shortened to land on an output time should not shrink the next.
      h = hit ? std::max(h, hs * factor) : hs * factor;
    } else {
      ++traj.stats.rejected;
      h = hs * std::max(factor, 0.2);
    }
  }
  return traj;
}

Trajectory integrate(const Liouvillian& l, const DensityMatrix& rho0, double t_end, const IntegrateOptions& options) {
  if (rho0.basis() != l.basis()) throw ValidationError("integrate: state and generator bases differ");
  const ComplexMatrix m = l.matrix();
  return integrate([&m](double, ComplexMatrix& out) { out = m; }, model_name(l.kind()), rho0, t_end, options);
}

double gaussian_coupling(double g_peak, const CavityGeometry& geom, double t_total, double t_prime) {
  geom.validate();
  if (!(t_total > 0.0)) throw ValidationError("gaussian_coupling: t_total must be > 0");
  if (t_prime < 0.0 || t_prime > t_total) throw ValidationError("gaussian_coupling: t' outside [0, t_total]");
  const double v = geom.velocity ? *geom.velocity : geom.diameter / t_total;
  const double x = v * (0.5 * t_total - t_prime) / geom.waist;
  return g_peak * std::exp(-x * x);
}

double effective_time(double t, const CavityGeometry& geom) {
  geom.validate();
  return geom.effective_time_factor() * t;
}

double true_time(double t_eff, const CavityGeometry& geom) {
  geom.validate();
  return t_eff / geom.effective_time_factor();
}

DensityMatrix nstep_propagate(const ModelKind& kind, const PhysicalParams& p, const CouplingProfile& profile,
                              const DensityMatrix& rho0, double t, std::size_t n) {
  if (n == 0) throw ValidationError("nstep_propagate: n must be >= 1");
  if (!(t >= 0.0)) throw ValidationError("nstep_propagate: t must be >= 0");
  p.validate();
  const CouplingFamily family = coupling_family(kind);
  if (rho0.basis() != family.basis) throw ValidationError("nstep_propagate: state basis does not match the model");
  SuperVector v = vectorize(rho0.matrix());
  if (t == 0.0) return rho0;
  const double dt = t / static_cast<double>(n);
  const auto* gp = std::get_if<GaussianProfile>(&profile);
  if (!gp) {
    const ComplexMatrix l = family.at(p.g);
    for (std::size_t j = 0; j < n; ++j) expm_action(l, dt, v);
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const double tj = (static_cast<double>(j) + 0.5) * dt;
      expm_action(family.at(gaussian_coupling(p.g, gp->geometry, t, tj)), dt, v);
    }
  }
  return DensityMatrix::unchecked(unvectorize(v), family.basis);
}

DensityMatrix integrate_gaussian(const ModelKind& kind, const PhysicalParams& p, const CavityGeometry& geom,
                                 const DensityMatrix& rho0, double t_total, const IntegrateOptions& options,
                                 TrajectoryStats* stats) {
  p.validate();
  if (t_total == 0.0) return rho0;
  const CouplingFamily family = coupling_family(kind);
  if (rho0.basis() != family.basis) throw ValidationError("integrate_gaussian: state basis does not match the model");
  IntegrateOptions o = options;
  o.output_times = {t_total};
  auto gen = [&](double tp, ComplexMatrix& out) {
    const double g = gaussian_coupling(p.g, geom, t_total, std::clamp(tp, 0.0, t_total));
    out = family.at(g);
  };
  Trajectory tr = integrate(gen, model_name(kind), rho0, t_total, o);
  if (stats) *stats = tr.stats;
  return tr.states.back();
}

}  // namespace vrabi
