#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "vrabi/closed_form.hpp"
#include "vrabi/evolve.hpp"

using namespace vrabi;

namespace {

constexpr double kUs = 1e-6;

DensityMatrix rk_state(const ModelKind& kind, const PhysicalParams& p, double t) {
  const Liouvillian l = build_liouvillian(kind, p);
  IntegrateOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  return integrate(l, excited_state(l.basis()), t, o).states.back();
}

double eigen_defect(const DecayRates& r, const PhysicalParams& p) {
  const Liouvillian l = build_liouvillian(OpenCavity{r}, p);
  const DampingBasis db = damping_basis(r, p);
  double worst = 0.0;
  for (std::size_t k = 0; k < 9; ++k) {
    const ComplexMatrix& rk = db.operators[k];
    const double d = max_abs_diff(l.apply(rk), rk * db.eigenvalues[k]) / rk.max_abs();
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

TEST_CASE("phenom_t0 solution") {
  const PhysicalParams p = PhysicalParams::reference();
  const double g = p.g;

  SUBCASE("initial condition") {
    const auto s = phenom_t0_rho(g, 0.3 * g, 0.0);
    CHECK(max_abs_diff(s.rho.matrix(), ComplexMatrix::unit(3, 0, 0)) <= 1e-15);
    CHECK(s.regime == Regime::Oscillatory);
  }
  SUBCASE("lossless Rabi limit") {
    for (double t : {1e-6, 7.3e-6, 20e-6}) {
      const auto pr = phenom_t0_probs(g, 0.0, t);
      CHECK(pr.e0 == doctest::Approx(std::pow(std::cos(g * t), 2)).epsilon(1e-12));
      CHECK(pr.g1 == doctest::Approx(std::pow(std::sin(g * t), 2)).epsilon(1e-12));
      CHECK(std::abs(pr.g0) <= 1e-15);
    }
    const auto half = phenom_t0_probs(g, 0.0, kPi / (2.0 * g));
    CHECK(std::abs(half.e0) <= 1e-14);
    CHECK(half.g1 == doctest::Approx(1.0));
  }
  SUBCASE("long-time limit") {
    const auto pr = phenom_t0_probs(g, 0.3 * g, 2000.0 / g);
    CHECK(std::abs(pr.e0) <= 1e-12);
    CHECK(std::abs(pr.g1) <= 1e-12);
    CHECK(pr.g0 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("probabilities sum to one") {
    for (double t : {0.0, 3e-6, 40e-6, 400e-6}) {
      const auto pr = phenom_t0_probs(g, 0.3 * g, t);
      CHECK(std::abs(pr.e0 + pr.g1 + pr.g0 - 1.0) <= 1e-12);
    }
  }
  SUBCASE("oracle in both regimes") {
    for (double gamma : {0.3 * g, 6.0 * g}) {
      CAPTURE(gamma / g);
      const double t = 20 * kUs;
      const auto s = phenom_t0_rho(g, gamma, t);
      CHECK(s.regime == (gamma < 4.0 * g ? Regime::Oscillatory : Regime::Overdamped));
      CHECK(max_abs_diff(s.rho.matrix(), rk_state(PhenomT0{gamma}, p, t).matrix()) <= 1e-8);
    }
  }
}

TEST_CASE("scala solution") {
  const PhysicalParams p = PhysicalParams::reference();
  const double g = p.g;
  CHECK(max_abs_diff(scala_rho(g, 0.1 * g, 0.05 * g, 0.0).matrix(), excited_state(Basis::Dressed).matrix()) <=
        1e-15);
  CHECK(scala_pg(g, 0.0, 0.0, 13 * kUs) == doctest::Approx(std::pow(std::sin(g * 13 * kUs), 2)).epsilon(1e-12));
  CHECK(scala_pg(g, 0.1 * g, 0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
  for (double t : {1 * kUs, 30 * kUs, 222 * kUs})
    CHECK(scala_pg(g, 0.1 * g, 0.05 * g, t) == scala_pg(g, 0.05 * g, 0.1 * g, t));

  const double t = 30 * kUs;
  const DensityMatrix rk = rk_state(Microscopic{0.1 * g, 0.05 * g}, p, t);
  CHECK(max_abs_diff(scala_rho(g, 0.1 * g, 0.05 * g, t).matrix(), rk.matrix()) <= 1e-10);
  CHECK(std::abs(scala_pg(g, 0.1 * g, 0.05 * g, t) - ground_probability(rk)) <= 1e-10);
}

TEST_CASE("damping basis") {
  const PhysicalParams p = PhysicalParams::reference();
  const double g = p.g;
  const double eps = 0.0466;

  SUBCASE("eigen-relation and stationary value") {
    const DecayRates cases[] = {
        DecayRates::simplified(17.73, 17.73, 0.07 * g, eps),
        DecayRates::simplified(0.1 * g, 0.05 * g, 0.02 * g, eps),
        DecayRates::detailed_balance(0.1 * g, 0.05 * g, 0.07 * g, p),
        DecayRates::simplified(0.1 * g, 0.05 * g, 0.07 * g, 0.0),
    };
    for (const auto& r : cases) {
      const auto db = damping_basis(r, p);
      CHECK(db.eigenvalues[0] == cplx(0.0));
      for (const auto& lam : db.eigenvalues) CHECK(lam.real() <= 0.0);
      CHECK(eigen_defect(r, p) <= 1e-10);
    }
  }
  SUBCASE("S for equal rates") {
    const double gamma = 17.73, g3 = 0.07 * g;
    const auto db = damping_basis(DecayRates::simplified(gamma, gamma, g3, eps), p);
    CHECK(std::abs(db.S) == doctest::Approx(std::abs(2.0 * g3 - 2.0 * eps * gamma)).epsilon(1e-10));
  }
  SUBCASE("Scala limit") {
    DecayRates r;
    r.gamma1 = 0.1 * g;
    r.gamma2 = 0.05 * g;
    const auto db = damping_basis(r, p);
    CHECK(std::abs(db.eigenvalues[1] + 0.5 * 0.1 * g) <= 1e-9 * g);
    CHECK(std::abs(db.eigenvalues[2] + 0.5 * 0.05 * g) <= 1e-9 * g);
  }
}

TEST_CASE("initial decomposition") {
  const PhysicalParams p = PhysicalParams::reference();
  const OpenCavityParams oc{17.73, 25.0, 0.07 * p.g, 0.0466};
  const auto a = initial_decomposition(oc);
  CHECK(std::abs(a.a4 + 0.5) <= 1e-15);
  CHECK(std::abs(a.a7 + 0.5) <= 1e-15);
  const auto db = damping_basis(oc.rates(), p);
  const ComplexMatrix sum = db.operators[0] * a.a1 + db.operators[1] * a.a2 + db.operators[2] * a.a3 +
                            db.operators[3] * a.a4 + db.operators[6] * a.a7;
  CHECK(max_abs_diff(sum, excited_state(Basis::Dressed).matrix()) <= 1e-10);
}

TEST_CASE("open-cavity solution") {
  const PhysicalParams p = PhysicalParams::reference();
  const double g = p.g;
  const double eps = 0.0466;
  const OpenCavityParams oc{17.73, 17.73, 0.07 * g, eps};

  SUBCASE("initial state") {
    const auto r = opencavity_rho(oc, p, 0.0);
    CHECK(max_abs_diff(r.value.matrix(), excited_state(Basis::Dressed).matrix()) <= 1e-15);
    CHECK(opencavity_pg(oc, p, 0.0).value == 0.0);
  }
  SUBCASE("thermal limit") {
    const auto r = opencavity_rho(oc, p, 50.0);
    const double z = 2.0 * eps + 1.0;
    const double d[] = {eps / z, eps / z, 1.0 / z};
    CHECK(max_abs_diff(r.value.matrix(), ComplexMatrix::diagonal(d)) <= 1e-12);
    CHECK(std::abs(opencavity_pg(oc, p, 50.0).value - 0.957) <= 1e-3);
    CHECK(opencavity_pg_limit(eps) == doctest::Approx((1 + eps) / (1 + 2 * eps)));
  }
  SUBCASE("oracle at 25 us") {
    const double t = 25 * kUs;
    const DensityMatrix rk = rk_state(OpenCavity{oc.rates()}, p, t);
    CHECK(max_abs_diff(opencavity_rho(oc, p, t).value.matrix(), rk.matrix()) <= 1e-8);
  }
  SUBCASE("pure intra-manifold decay") {
    const double g3 = 0.07 * g;
    const OpenCavityParams only3{0.0, 0.0, g3, 0.0};
    for (double t : {5 * kUs, 40 * kUs, 123 * kUs}) {
      const double expected = 0.5 - 0.5 * std::exp(-g3 * t / 2.0) * std::cos(2.0 * g * t);
      CHECK(std::abs(opencavity_pg(only3, p, t).value - expected) <= 1e-10);
      CHECK(std::abs(ground_probability(rk_state(OpenCavity{only3.rates()}, p, t)) - expected) <= 1e-8);
    }
  }
  SUBCASE("lossless") {
    const OpenCavityParams none{};
    for (double t : {5 * kUs, 41 * kUs})
      CHECK(opencavity_pg(none, p, t).value == doctest::Approx(std::pow(std::sin(g * t), 2)).epsilon(1e-10));
  }
  SUBCASE("approach to the asymptote") {
    const auto db = damping_basis(oc.rates(), p);
    const double slow = std::min(std::abs(db.eigenvalues[1].real()), std::abs(db.eigenvalues[2].real()));
    CHECK(std::abs(opencavity_pg(oc, p, 10.0 / slow).value - opencavity_pg_limit(eps)) <= 1e-4);
  }
  SUBCASE("Gaussian profile changes only the phase") {
    const GaussianProfile gp{};
    for (double t : {7 * kUs, 80 * kUs}) {
      const auto c = opencavity_rho(oc, p, t).value;
      const auto w = opencavity_rho(oc, p, t, gp).value;
      CHECK(std::abs(std::abs(c(0, 1)) - std::abs(w(0, 1))) <= 1e-10);
      CHECK(std::abs(c(0, 0) - w(0, 0)) <= 1e-12);
    }
  }
}

TEST_CASE("degenerate rates use the numerical fallback") {
  const PhysicalParams p = PhysicalParams::reference();
  const double g = p.g;
  const OpenCavityParams oc{0.05 * g, 0.05 * g, 0.0466 * 0.05 * g, 0.0466};
  CHECK(oc.degenerate());
  const double t = 60 * kUs;
  const auto pg = opencavity_pg(oc, p, t);
  CHECK(pg.fallback);
  CHECK(std::abs(pg.value - ground_probability(rk_state(OpenCavity{oc.rates()}, p, t))) <= 1e-8);
  CHECK(opencavity_rho(oc, p, t).fallback);
  CHECK(energy_mean(oc, p, t).fallback);
}

TEST_CASE("mean energy") {
  const PhysicalParams p = PhysicalParams::reference();
  const double w0 = p.omega0;
  const double gamma = 17.73, eps = 0.0466;
  for (double t : {0.0, 10 * kUs, 30e-3}) {
    const double expected = w0 * (2 * eps + std::exp(-gamma * (2 * eps + 1) * t / 2)) / (2 * eps + 1);
    const double a = energy_mean({gamma, gamma, 0.07 * p.g, eps}, p, t).value + 0.5 * w0;
    const double b = energy_mean({gamma, gamma, 0.2 * p.g, eps}, p, t).value + 0.5 * w0;
    CHECK(a == doctest::Approx(expected).epsilon(1e-9));
    CHECK(b == doctest::Approx(expected).epsilon(1e-9));
    const double cold = energy_mean({gamma, gamma, 0.07 * p.g, 0.0}, p, t).value + 0.5 * w0;
    CHECK(cold == doctest::Approx(w0 * std::exp(-gamma * t / 2)).epsilon(1e-9));
  }
  const double asymptote = energy_mean({gamma, gamma, 0.07 * p.g, eps}, p, 100.0).value;
  CHECK(asymptote == doctest::Approx(w0 * (1 - 1 / (2 * eps + 1)) - 0.5 * w0).epsilon(1e-9));
}

TEST_CASE("thermal fitting formulas") {
  const double g = 47.0 * kPi * 1e3;
  const CavityGeometry geom;
  const double f = geom.effective_time_factor();
  for (double t : {3 * kUs, 17 * kUs}) {
    CHECK(brune_fit_formula(BruneVariant::EffTime, 0.0, g, 0.0, geom, t) ==
          doctest::Approx(std::pow(std::sin(g * t), 2)).epsilon(1e-12));
    CHECK(brune_fit_formula(BruneVariant::TrueTime, 0.0, g, 0.0, geom, t) ==
          doctest::Approx(std::pow(std::sin(g * f * t), 2)).epsilon(1e-12));
  }
  for (auto v : {BruneVariant::EffTime, BruneVariant::TrueTime, BruneVariant::Rescaled})
    CHECK(brune_fit_formula(v, 1.0 / 220e-6, g, 0.05, geom, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  // With n = 0 only and cos = 1 the decay exponent is exposed directly.
  const double gamma = 1.0 / 220e-6;
  const double t = kPi / g * 7;
  auto exponent = [&](BruneVariant v) {
    return -std::log(2.0 * (1.0 - brune_fit_formula(v, gamma, g, 0.0, geom, t)) - 1.0);
  };
  CHECK(exponent(BruneVariant::Rescaled) == doctest::Approx(exponent(BruneVariant::EffTime) / f).epsilon(1e-9));
}
