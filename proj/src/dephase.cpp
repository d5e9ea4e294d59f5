#include "vrabi/dephase.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "vrabi/errors.hpp"

namespace vrabi {

namespace {

void check_delta(double delta_t, double t) {
  if (!(delta_t >= 0.0) || !std::isfinite(delta_t)) throw ValidationError("delta_t must be finite and >= 0");
  if (!(t >= 0.0)) throw ValidationError("time must be >= 0");
}

// log(1 + z) without cancellation for small |z|.
cplx log1p_c(cplx z) {
  const double re = 0.5 * std::log1p(2.0 * z.real() + std::norm(z));
  return {re, std::atan2(z.imag(), 1.0 + z.real())};
}

}  // namespace

double gamma_kernel(double t, double t_prime, double delta_t) {
  if (!(t > 0.0) || !(delta_t > 0.0)) throw ValidationError("gamma_kernel: t and delta_t must be > 0");
  if (t_prime < 0.0) throw ValidationError("gamma_kernel: t' must be >= 0");
  const double k = t / delta_t;
  const double x = t_prime / delta_t;
  if (x == 0.0) return k == 1.0 ? 1.0 / delta_t : (k < 1.0 ? INFINITY : 0.0);
  return std::exp(-x + (k - 1.0) * std::log(x) - std::lgamma(k)) / delta_t;
}

cplx gamma_transform(cplx kappa, double t, double delta_t) {
  check_delta(delta_t, t);
  if (delta_t == 0.0 || t == 0.0) return std::exp(-kappa * t);
  return std::exp(-(t / delta_t) * log1p_c(kappa * delta_t));
}

double convolve_numeric(const std::function<double(double)>& f, double t, double delta_t, double rel_tol) {
  check_delta(delta_t, t);
  if (delta_t == 0.0 || t == 0.0) return f(t);
  const double upper = t + 12.0 * std::sqrt(t * delta_t) + 40.0 * delta_t;
  auto integrand = [&](double tp) { return tp <= 0.0 ? 0.0 : gamma_kernel(t, tp, delta_t) * f(tp); };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  // Bisection against one absolute budget: the error allowed on a panel is
  // proportional to its width, so far-tail panels stop as soon as they are
  // negligible instead of chasing their own relative accuracy.
  double l1 = 0.0;
  Rule::integrate(integrand, 0.0, upper, 0, 0.0, nullptr, &l1);
  const double budget = rel_tol * std::max(l1, std::numeric_limits<double>::min()) / upper;
  std::function<double(double, double, int)> panel = [&](double a, double b, int depth) {
    double err = 0.0;
    const double v = Rule::integrate(integrand, a, b, 0, 0.0, &err);
    // The rule reports its error on the reference interval [-1, 1].
    err *= 0.5 * (b - a);
    if (err <= budget * (b - a) || depth == 0) return v;
    const double m = 0.5 * (a + b);
    return panel(a, m, depth - 1) + panel(m, b, depth - 1);
  };
  return panel(0.0, upper, 20);
}

double convolve(const ExpSum& sum, double t, double delta_t) {
  check_delta(delta_t, t);
  cplx v = sum.constant;
  for (const auto& term : sum.terms) v += term.amplitude * gamma_transform(term.rate, t, delta_t);
  return v.real();
}

Evaluation<double> convolve_pg(const OpenCavityParams& oc, const PhysicalParams& p, const CouplingProfile& profile,
                               double delta_t, double t) {
  check_delta(delta_t, t);
  oc.validate();
  p.validate();
  if (delta_t == 0.0 || t == 0.0) return opencavity_pg(oc, p, t, profile);
  if (oc.degenerate()) {
    const auto f = [&](double tp) { return ground_probability(opencavity_rho_numeric(oc, p, tp, profile)); };
    return {convolve_numeric(f, t, delta_t), true};
  }
  return {convolve(opencavity_pg_terms(oc, p, profile), t, delta_t), false};
}

Evaluation<double> convolve_energy(const OpenCavityParams& oc, const PhysicalParams& p, double delta_t, double t) {
  check_delta(delta_t, t);
  oc.validate();
  p.validate();
  if (delta_t == 0.0 || t == 0.0) return energy_mean(oc, p, t);
  if (oc.degenerate()) {
    const auto f = [&](double tp) { return mean_energy(opencavity_rho_numeric(oc, p, tp), p); };
    return {convolve_numeric(f, t, delta_t), true};
  }
  return {convolve(energy_terms(oc, p), t, delta_t), false};
}

}  // namespace vrabi
