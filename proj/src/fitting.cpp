#include "vrabi/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vrabi/dephase.hpp"
#include "vrabi/errors.hpp"
#include "vrabi/evolve.hpp"

namespace vrabi {

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

// Gaussian elimination with partial pivoting; false when singular.
bool solve(Mat a, Vec b, Vec& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0 || !std::isfinite(a[piv][c])) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return true;
}

struct Evaluator {
  const FitProblem& problem;

  Vec residuals(const Vec& x) const {
    Vec r(problem.data.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto& d = problem.data[i];
      r[i] = (problem.model(x, d.t) - d.y) / d.sigma;
    }
    return r;
  }
};

double sum_sq(const Vec& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

Vec clamp_to(const Vec& x, const std::vector<ParameterSpec>& specs) {
  Vec y = x;
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::clamp(y[j], specs[j].lower, specs[j].upper);
  return y;
}

std::string format_combination(const std::vector<ParameterSpec>& specs, const ComplexMatrix& vectors,
                               std::size_t column) {
  std::ostringstream os;
  bool first = true;
  double largest = 0.0;
  for (std::size_t j = 0; j < specs.size(); ++j) largest = std::max(largest, std::abs(vectors(j, column).real()));
  std::vector<std::size_t> used;
  for (std::size_t j = 0; j < specs.size(); ++j)
    if (std::abs(vectors(j, column).real()) >= 1e-3 * largest) used.push_back(j);
  if (used.size() == 1) return specs[used[0]].name;
  // The eigenvector sign is arbitrary; lead with a positive coefficient.
  const double sign = vectors(used[0], column).real() < 0.0 ? -1.0 : 1.0;
  for (std::size_t j : used) {
    const double c = sign * vectors(j, column).real();
    char buf[64];
    if (first)
      std::snprintf(buf, sizeof buf, "%.3g*%s", c, specs[j].name.c_str());
    else
      std::snprintf(buf, sizeof buf, " %s %.3g*%s", c < 0 ? "-" : "+", std::abs(c), specs[j].name.c_str());
    os << buf;
    first = false;
  }
  return os.str();
}

}  // namespace

void FitProblem::validate() const {
  if (!model) throw ValidationError("FitProblem: model function missing");
  if (parameters.empty()) throw ValidationError("FitProblem: no free parameters");
  if (data.size() < parameters.size()) throw ValidationError("FitProblem: fewer data points than parameters");
  for (const auto& d : data)
    if (!(d.sigma > 0.0) || !std::isfinite(d.y) || !std::isfinite(d.t))
      throw ValidationError("FitProblem: data need finite values and sigma > 0");
  for (const auto& p : parameters)
    if (!(p.lower <= p.upper) || !std::isfinite(p.initial) || p.initial < p.lower || p.initial > p.upper)
      throw ValidationError("FitProblem: bad bounds or initial value for " + p.name);
}

double FitResult::value(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return values[j];
  throw ValidationError("FitResult: no parameter " + name);
}

double FitResult::std_error(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return std_errors[j];
  throw ValidationError("FitResult: no parameter " + name);
}

FitResult levenberg_marquardt(const FitProblem& problem, const LmOptions& opt) {
  problem.validate();
  const auto& specs = problem.parameters;
  const std::size_t n = specs.size();
  const std::size_t m = problem.data.size();
  const Evaluator ev{problem};

  Vec typical(n);
  for (std::size_t j = 0; j < n; ++j) typical[j] = specs[j].initial != 0.0 ? std::abs(specs[j].initial) : 1.0;

  Vec x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = specs[j].initial;
  x = clamp_to(x, specs);
  Vec r = ev.residuals(x);
  double cost = sum_sq(r);

  auto jacobian = [&](const Vec& at, const Vec& r0) {
    Mat jac(m, Vec(n));
    for (std::size_t j = 0; j < n; ++j) {
      double h = opt.fd_step * std::max(std::abs(at[j]), typical[j]);
      Vec xp = at;
      if (at[j] + h > specs[j].upper) h = -h;
      xp[j] = at[j] + h;
      const double hs = xp[j] - at[j];
      const Vec rp = ev.residuals(xp);
      for (std::size_t i = 0; i < m; ++i) jac[i][j] = (rp[i] - r0[i]) / hs;
    }
    return jac;
  };

  FitResult out;
  for (const auto& s : specs) out.names.push_back(s.name);
  out.cost_history.push_back(cost);

  double mu = opt.initial_damping;
  Mat jac = jacobian(x, r);
  Mat a(n, Vec(n));
  Vec grad(n);
  auto normal = [&] {
    for (std::size_t p = 0; p < n; ++p) {
      grad[p] = 0.0;
      for (std::size_t i = 0; i < m; ++i) grad[p] += jac[i][p] * r[i];
      for (std::size_t q = 0; q < n; ++q) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += jac[i][p] * jac[i][q];
        a[p][q] = s;
      }
    }
  };
  auto scaled_grad_norm = [&] {
    double g = 0.0;
    for (std::size_t j = 0; j < n; ++j) g = std::max(g, std::abs(grad[j]) * std::max(std::abs(x[j]), typical[j]));
    return g;
  };
  normal();

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (scaled_grad_norm() <= opt.gradient_tol * (1.0 + cost)) {
      out.converged = true;
      out.stop_reason = "gradient";
      break;
    }
    bool accepted = false;
    bool small_step = false;
    while (!accepted) {
      Mat damped = a;
      for (std::size_t j = 0; j < n; ++j) damped[j][j] += mu * std::max(a[j][j], 1e-300);
      Vec neg(n);
      for (std::size_t j = 0; j < n; ++j) neg[j] = -grad[j];
      Vec step;
      if (!solve(damped, neg, step)) {
        mu *= 10.0;
        if (mu > 1e20) break;
        continue;
      }
      const Vec xn = clamp_to([&] {
        Vec y = x;
        for (std::size_t j = 0; j < n; ++j) y[j] += step[j];
        return y;
      }(), specs);
      double dx = 0.0, xs = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        dx = std::max(dx, std::abs(xn[j] - x[j]) / typical[j]);
        xs = std::max(xs, std::abs(x[j]) / typical[j]);
      }
      const Vec rn = ev.residuals(xn);
      const double cn = sum_sq(rn);
      if (std::isfinite(cn) && cn <= cost) {
        accepted = true;
        small_step = dx <= opt.step_tol * (xs + opt.step_tol);
        x = xn;
        r = rn;
        cost = cn;
        mu = std::max(mu / 10.0, 1e-12);
        out.cost_history.push_back(cost);
      } else {
        mu *= 10.0;
        if (dx <= opt.step_tol * (xs + opt.step_tol) || mu > 1e20) {
          small_step = true;
          break;
        }
      }
    }
    if (!accepted) {
      // No downhill step exists at machine resolution: a stationary point.
      out.converged = scaled_grad_norm() <= std::sqrt(opt.gradient_tol) * (1.0 + cost) || small_step;
      out.stop_reason = "no downhill step";
      break;
    }
    jac = jacobian(x, r);
    normal();
    if (small_step) {
      out.converged = true;
      out.stop_reason = "step";
      ++it;
      break;
    }
  }
  if (it >= opt.max_iterations && out.stop_reason.empty()) out.stop_reason = "iteration limit";
  out.iterations = it;
  out.values = x;
  out.cost = cost;

  // Rank and standard errors from the scaled normal matrix X A X.
  Vec scale(n);
  for (std::size_t j = 0; j < n; ++j) scale[j] = std::max(std::abs(x[j]), typical[j]);
  ComplexMatrix sa(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) sa(p, q) = scale[p] * a[p][q] * scale[q];
  const EigenSystem es = hermitian_eigen(sa);
  const double top = std::max(es.values.front(), 0.0);
  out.std_errors.assign(n, 0.0);
  std::vector<bool> flat(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = es.values[k];
    if (top == 0.0 || lam <= opt.rank_tol * top) {
      out.rank_deficient = true;
      if (out.flat_combination.empty()) out.flat_combination = format_combination(specs, es.vectors, k);
      double largest = 0.0;
      for (std::size_t j = 0; j < n; ++j) largest = std::max(largest, std::abs(es.vectors(j, k)));
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(es.vectors(j, k)) >= 1e-3 * largest) flat[j] = true;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) out.std_errors[j] += std::norm(es.vectors(j, k)) / lam;
  }
  if (out.rank_deficient && opt.rank_policy == RankPolicy::Throw)
    throw RankDeficientError("levenberg_marquardt: singular normal matrix along " + out.flat_combination,
                             out.flat_combination);
  for (std::size_t j = 0; j < n; ++j)
    out.std_errors[j] = flat[j] ? std::numeric_limits<double>::infinity() : std::sqrt(out.std_errors[j]) * scale[j];
  return out;
}

const char* convention_name(TimeConvention c) { return c == TimeConvention::True ? "true" : "effective"; }

void ExperimentSeries::validate() const {
  if (points.empty()) throw ValidationError("ExperimentSeries: no points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.t_us) || p.t_us < 0.0) throw ValidationError("ExperimentSeries: bad time at point " + std::to_string(i + 1));
    if (i > 0 && !(p.t_us > points[i - 1].t_us))
      throw ValidationError("ExperimentSeries: times not ascending at point " + std::to_string(i + 1));
    if (!(p.p_g >= 0.0 && p.p_g <= 1.0))
      throw ValidationError("ExperimentSeries: p_g outside [0,1] at point " + std::to_string(i + 1));
    if (!(p.sigma >= 0.0)) throw ValidationError("ExperimentSeries: negative sigma at point " + std::to_string(i + 1));
  }
}

QFit fit_q(const EnergySeries& s, double eps, double omega0, const LmOptions& options) {
  if (s.t.size() != s.omega.size() || s.t.size() < 2) throw ValidationError("fit_q: need at least two samples");
  if (!(omega0 > 0.0)) throw ValidationError("fit_q: omega0 must be > 0");
  const double asymptote = 0.5 * omega0 * (2.0 * eps - 1.0) / (2.0 * eps + 1.0);
  const double amplitude = omega0 / (2.0 * eps + 1.0);
  FitProblem prob;
  for (std::size_t i = 0; i < s.t.size(); ++i) prob.data.push_back({s.t[i], (s.omega[i] - asymptote) / amplitude, 1.0});
  const double first = prob.data.front().y, last = prob.data.back().y;
  if (!(last < first) || !(last > 0.0)) throw ValidationError("fit_q: input does not decay towards the asymptote");
  // Initial rate from the end points.
  const double k0 = std::log(first / last) / (s.t.back() - s.t.front());
  prob.parameters = {{"rate", k0, 0.0}};
  prob.model = [](std::span<const double> x, double t) { return std::exp(-x[0] * t); };
  QFit out{0.0, levenberg_marquardt(prob, options)};
  out.q = omega0 / out.fit.values[0];
  return out;
}

double q_from_rate(double gamma, double eps, double omega0, TimeConvention c, const CavityGeometry& geom) {
  if (!(gamma > 0.0)) throw ValidationError("q_from_rate: gamma must be > 0");
  const double q = 2.0 * omega0 / (gamma * (2.0 * eps + 1.0));
  return c == TimeConvention::True ? q : q * geom.effective_time_factor();
}

double rate_from_q(double q, double eps, double omega0, TimeConvention c, const CavityGeometry& geom) {
  if (!(q > 0.0)) throw ValidationError("rate_from_q: Q must be > 0");
  const double gamma = 2.0 * omega0 / (q * (2.0 * eps + 1.0));
  return c == TimeConvention::True ? gamma : gamma * geom.effective_time_factor();
}

CavityGeometry RabiModelConfig::geometry() const {
  if (const auto* gp = std::get_if<GaussianProfile>(&profile)) return gp->geometry;
  return CavityGeometry{};
}

namespace {

struct Binding {
  std::vector<ParameterSpec> specs;
  std::vector<std::string> targets;  // "gamma12", "gamma1", "gamma2", "gamma3", "delta_t"

  RabiModelConfig apply(RabiModelConfig c, std::span<const double> x) const {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const auto& t = targets[j];
      if (t == "gamma12") c.gamma1 = c.gamma2 = x[j];
      else if (t == "gamma1") c.gamma1 = x[j];
      else if (t == "gamma2") c.gamma2 = x[j];
      else if (t == "gamma3") c.gamma3 = x[j];
      else if (t == "delta_t") c.delta_t = x[j];
    }
    return c;
  }
};

Binding bind(const RabiModelConfig& c, const RabiFitSpec& spec) {
  if (spec.free.empty()) throw ValidationError("fit: empty free-parameter set");
  Binding b;
  auto add = [&](const std::string& name, double init) {
    if (std::find(b.targets.begin(), b.targets.end(), name) != b.targets.end()) return;
    b.targets.push_back(name);
    b.specs.push_back({name, init, 0.0});
  };
  for (const auto& f : spec.free) {
    if (f == "gamma1" || f == "gamma2" || f == "gamma12") {
      if (spec.tie_gamma12 || f == "gamma12")
        add("gamma12", c.gamma1);
      else
        add(f, f == "gamma1" ? c.gamma1 : c.gamma2);
    } else if (f == "gamma3") {
      add(f, c.gamma3);
    } else if (f == "delta_t") {
      add(f, c.delta_t);
    } else {
      throw ValidationError("fit: unknown parameter '" + f + "'");
    }
  }
  return b;
}

double rabi_model(const RabiModelConfig& c, double t_true) {
  const OpenCavityParams oc = c.open_cavity();
  if (c.delta_t > 0.0) return convolve_pg(oc, c.params, c.profile, c.delta_t, t_true).value;
  return opencavity_pg(oc, c.params, t_true, c.profile).value;
}

}  // namespace

FitResult fit_rabi(const ExperimentSeries& series, const RabiModelConfig& config, const RabiFitSpec& spec,
                   const LmOptions& options) {
  series.validate();
  const Binding b = bind(config, spec);
  const bool constant = std::all_of(series.points.begin(), series.points.end(),
                                    [&](const ExperimentPoint& p) { return p.p_g == series.points.front().p_g; });
  if (constant) throw RankDeficientError("fit_rabi: constant data carry no information about the rates", "all");

  const CavityGeometry geom = config.geometry();
  FitProblem prob;
  for (const auto& p : series.points) {
    const double t = series.convention == TimeConvention::Effective ? true_time(p.seconds(), geom) : p.seconds();
    prob.data.push_back({t, p.p_g, p.sigma > 0.0 ? p.sigma : 1.0});
  }
  prob.parameters = b.specs;
  prob.model = [&config, &b](std::span<const double> x, double t) { return rabi_model(b.apply(config, x), t); };
  return levenberg_marquardt(prob, options);
}

FitResult fit_energy_rates(const EnergySeries& series, const RabiModelConfig& config, const RabiFitSpec& spec,
                           const LmOptions& options) {
  if (series.t.size() != series.omega.size() || series.t.empty()) throw ValidationError("fit_energy_rates: bad series");
  const Binding b = bind(config, spec);
  const double w0 = config.params.omega0;
  const CavityGeometry geom = config.geometry();
  FitProblem prob;
  // Residuals in units of omega0 keep the cost O(1).
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double t = series.convention == TimeConvention::Effective ? true_time(series.t[i], geom) : series.t[i];
    prob.data.push_back({t, series.omega[i] / w0, 1.0});
  }
  prob.parameters = b.specs;
  prob.model = [&config, &b, w0](std::span<const double> x, double t) {
    const RabiModelConfig c = b.apply(config, x);
    const OpenCavityParams oc = c.open_cavity();
    const double v = c.delta_t > 0.0 ? convolve_energy(oc, c.params, c.delta_t, t).value
                                     : energy_mean(oc, c.params, t).value;
    return v / w0;
  };
  return levenberg_marquardt(prob, options);
}

}  // namespace vrabi
