#include <cmath>
#include <random>

#include "doctest.h"
#include "vrabi/dephase.hpp"
#include "vrabi/errors.hpp"
#include "vrabi/evolve.hpp"
#include "vrabi/fitting.hpp"

using namespace vrabi;

namespace {
constexpr double kUs = 1e-6;

ExperimentSeries synthetic_rabi(const RabiModelConfig& c, double end_us, double step_us) {
  ExperimentSeries s;
  for (double t = 0.0; t <= end_us + 1e-9; t += step_us) {
    const double ts = t * kUs;
    const double pg = c.delta_t > 0.0 ? convolve_pg(c.open_cavity(), c.params, c.profile, c.delta_t, ts).value
                                      : opencavity_pg(c.open_cavity(), c.params, ts, c.profile).value;
    s.points.push_back({t, pg, 0.0});
  }
  return s;
}
}  // namespace

TEST_CASE("LM on an affine model reproduces weighted least squares") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.0, 0.1);
  FitProblem prob;
  for (int i = 0; i < 40; ++i) {
    const double t = 0.25 * i;
    const double sigma = 0.05 + 0.01 * (i % 5);
    prob.data.push_back({t, 1.5 - 0.7 * t + noise(rng), sigma});
  }
  prob.parameters = {{"a", 0.0}, {"b", 0.0}};
  prob.model = [](std::span<const double> x, double t) { return x[0] + x[1] * t; };
  const FitResult r = levenberg_marquardt(prob);

  // normal equations by hand
  double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0;
  for (const auto& d : prob.data) {
    const double w = 1.0 / (d.sigma * d.sigma);
    s00 += w;
    s01 += w * d.t;
    s11 += w * d.t * d.t;
    r0 += w * d.y;
    r1 += w * d.t * d.y;
  }
  const double det = s00 * s11 - s01 * s01;
  const double a = (s11 * r0 - s01 * r1) / det;
  const double b = (s00 * r1 - s01 * r0) / det;
  CHECK(r.converged);
  CHECK(r.value("a") == doctest::Approx(a).epsilon(1e-8));
  CHECK(r.value("b") == doctest::Approx(b).epsilon(1e-8));
  CHECK(r.std_error("a") == doctest::Approx(std::sqrt(s11 / det)).epsilon(1e-6));
  CHECK(r.std_error("b") == doctest::Approx(std::sqrt(s00 / det)).epsilon(1e-6));
  CHECK(r.iterations > 0);
  for (std::size_t k = 1; k < r.cost_history.size(); ++k) CHECK(r.cost_history[k] <= r.cost_history[k - 1]);
}

TEST_CASE("LM on a nonlinear model") {
  FitProblem prob;
  for (int i = 0; i < 30; ++i) {
    const double t = 0.1 * i;
    prob.data.push_back({t, 2.0 * std::exp(-1.3 * t) + 0.1, 1.0});
  }
  prob.parameters = {{"amp", 1.0, 0.0}, {"rate", 0.2, 0.0, 10.0}, {"offset", 0.0}};
  prob.model = [](std::span<const double> x, double t) { return x[0] * std::exp(-x[1] * t) + x[2]; };
  const FitResult r = levenberg_marquardt(prob);
  CHECK(r.converged);
  CHECK(r.value("rate") == doctest::Approx(1.3).epsilon(1e-8));
  CHECK(r.cost <= 1e-16);
  for (std::size_t k = 1; k < r.cost_history.size(); ++k) CHECK(r.cost_history[k] <= r.cost_history[k - 1]);
  CHECK_THROWS_AS(r.value("nope"), ValidationError);
}

TEST_CASE("rank deficiency") {
  FitProblem prob;
  for (int i = 0; i < 10; ++i) prob.data.push_back({double(i), 3.0 * i, 1.0});
  prob.parameters = {{"a", 1.0}, {"b", 1.0}};
  prob.model = [](std::span<const double> x, double t) { return (x[0] + x[1]) * t; };
  try {
    levenberg_marquardt(prob);
    FAIL("expected RankDeficientError");
  } catch (const RankDeficientError& e) {
    CHECK(e.combination() == "0.707*a - 0.707*b");
  }
  LmOptions report;
  report.rank_policy = RankPolicy::Report;
  const FitResult r = levenberg_marquardt(prob, report);
  CHECK(r.rank_deficient);
  CHECK(std::isinf(r.std_error("a")));
  CHECK(std::isinf(r.std_error("b")));
  CHECK(r.value("a") + r.value("b") == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("problem validation") {
  FitProblem prob;
  prob.model = [](std::span<const double> x, double) { return x[0]; };
  prob.data = {{0.0, 1.0, 1.0}};
  CHECK_THROWS_AS(levenberg_marquardt(prob), ValidationError);
  prob.parameters = {{"a", 5.0, 0.0, 1.0}};
  CHECK_THROWS_AS(levenberg_marquardt(prob), ValidationError);
  prob.parameters = {{"a", 0.5}};
  prob.data = {{0.0, 1.0, 0.0}};
  CHECK_THROWS_AS(levenberg_marquardt(prob), ValidationError);
}

TEST_CASE("experiment series validation") {
  ExperimentSeries s;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.points = {{0.0, 0.1}, {1.0, 0.2}};
  CHECK_NOTHROW(s.validate());
  s.points = {{0.0, 0.1}, {0.0, 0.2}};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("at point 2"), ValidationError);
  s.points = {{0.0, 1.2}};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("outside [0,1]"), ValidationError);
  s.points = {{0.0, 0.5, -1.0}};
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("Q factor") {
  const PhysicalParams p = PhysicalParams::reference();
  const double eps = 0.0466;
  const double q = q_from_rate(17.73, eps, p.omega0, TimeConvention::True);
  CHECK(q == doctest::Approx(3.31e10).epsilon(0.005));
  CHECK(rate_from_q(q, eps, p.omega0, TimeConvention::True) == doctest::Approx(17.73).epsilon(1e-14));
  const CavityGeometry geom;
  CHECK(q_from_rate(17.73, eps, p.omega0, TimeConvention::Effective, geom) ==
        doctest::Approx(q * geom.effective_time_factor()).epsilon(1e-14));
  CHECK(rate_from_q(q_from_rate(5.0, eps, p.omega0, TimeConvention::Effective, geom), eps, p.omega0,
                    TimeConvention::Effective, geom) == doctest::Approx(5.0).epsilon(1e-14));

  SUBCASE("fit recovers the identity") {
    const OpenCavityParams oc{17.73, 17.73, 0.07 * p.g, eps};
    EnergySeries s;
    for (double t = 0.0; t <= 0.2; t += 2e-3) {
      s.t.push_back(t);
      s.omega.push_back(energy_mean(oc, p, t).value);
    }
    const QFit fit = fit_q(s, eps, p.omega0);
    CHECK(fit.q == doctest::Approx(q).epsilon(1e-6));
    CHECK(fit.fit.converged);
  }
  SUBCASE("flat input") {
    EnergySeries s{{0.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(fit_q(s, eps, p.omega0), ValidationError);
  }
}

TEST_CASE("Rabi fit round trips") {
  RabiModelConfig truth;
  truth.gamma3 = 0.07 * truth.params.g;
  const ExperimentSeries data = synthetic_rabi(truth, 200.0, 2.0);

  SUBCASE("tied gamma12 and gamma3") {
    RabiModelConfig start = truth;
    start.gamma1 = start.gamma2 = 1.3 * truth.gamma1;
    start.gamma3 = 0.8 * truth.gamma3;
    const FitResult r = fit_rabi(data, start, {{"gamma1", "gamma3"}, true});
    CHECK(r.converged);
    CHECK(r.names == std::vector<std::string>{"gamma12", "gamma3"});
    CHECK(r.value("gamma12") == doctest::Approx(truth.gamma1).epsilon(1e-3));
    CHECK(r.value("gamma3") == doctest::Approx(truth.gamma3).epsilon(1e-3));
    for (std::size_t k = 1; k < r.cost_history.size(); ++k) CHECK(r.cost_history[k] <= r.cost_history[k - 1]);
  }
  SUBCASE("effective-time series") {
    ExperimentSeries eff = data;
    eff.convention = TimeConvention::Effective;
    const CavityGeometry geom;
    for (auto& pt : eff.points) pt.t_us = effective_time(pt.t_us * kUs, geom) / kUs;
    RabiModelConfig start = truth;
    start.gamma3 = 0.8 * truth.gamma3;
    const FitResult r = fit_rabi(eff, start, {{"gamma3"}, true});
    CHECK(r.value("gamma3") == doctest::Approx(truth.gamma3).epsilon(1e-3));
  }
  SUBCASE("time uncertainty") {
    RabiModelConfig blurred = truth;
    blurred.delta_t = 2.37 * kUs;
    const ExperimentSeries bd = synthetic_rabi(blurred, 150.0, 3.0);
    RabiModelConfig start = blurred;
    start.delta_t = 1.5 * kUs;
    const FitResult r = fit_rabi(bd, start, {{"delta_t"}, true});
    CHECK(r.value("delta_t") == doctest::Approx(2.37 * kUs).epsilon(0.01));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fit_rabi(data, truth, {{}, true}), ValidationError);
    CHECK_THROWS_AS(fit_rabi(data, truth, {{"omega"}, true}), ValidationError);
    ExperimentSeries flat = data;
    for (auto& pt : flat.points) pt.p_g = 0.5;
    CHECK_THROWS_AS(fit_rabi(flat, truth, {{"gamma3"}, true}), RankDeficientError);
  }
}

TEST_CASE("energy fit cannot see gamma3 when gamma1 = gamma2") {
  RabiModelConfig c;
  c.gamma3 = 0.07 * c.params.g;
  EnergySeries s;
  for (double t = 0.0; t <= 0.2; t += 4e-3) {
    s.t.push_back(t);
    s.omega.push_back(energy_mean(c.open_cavity(), c.params, t).value);
  }
  RabiModelConfig start = c;
  start.gamma1 = start.gamma2 = 1.2 * c.gamma1;
  LmOptions report;
  report.rank_policy = RankPolicy::Report;
  const FitResult r = fit_energy_rates(s, start, {{"gamma12", "gamma3"}, true}, report);
  CHECK(r.rank_deficient);
  CHECK(r.flat_combination == "gamma3");
  CHECK(std::isinf(r.std_error("gamma3")));
  CHECK(r.value("gamma12") == doctest::Approx(c.gamma1).epsilon(1e-6));

  try {
    fit_energy_rates(s, start, {{"gamma12", "gamma3"}, true});
    FAIL("expected RankDeficientError");
  } catch (const RankDeficientError& e) {
    CHECK(e.combination() == "gamma3");
  }
}
