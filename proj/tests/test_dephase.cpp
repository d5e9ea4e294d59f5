#include <cmath>

#include "doctest.h"
#include "vrabi/dephase.hpp"

using namespace vrabi;

namespace {
constexpr double kUs = 1e-6;

PhysicalParams params() { return PhysicalParams::reference(); }
OpenCavityParams reference_rates() { return {17.73, 17.73, 0.07 * params().g, 0.0466}; }
}  // namespace

TEST_CASE("gamma kernel moments") {
  const double t = 100 * kUs, dt = 2.37 * kUs;
  const auto one = [](double) { return 1.0; };
  const auto id = [](double x) { return x; };
  const auto sq = [t](double x) { return (x - t) * (x - t); };
  CHECK(std::abs(convolve_numeric(one, t, dt) - 1.0) <= 1e-10);
  CHECK(std::abs(convolve_numeric(id, t, dt) - t) <= 1e-10 * t);
  CHECK(convolve_numeric(sq, t, dt) == doctest::Approx(t * dt).epsilon(1e-8));

  // concentration for small dt
  const double small = 1e-3 * kUs;
  const double half = 5.0 * std::sqrt(t * small);
  const auto window = [&](double x) { return std::abs(x - t) <= half ? 1.0 : 0.0; };
  CHECK(convolve_numeric(window, t, small) >= 1.0 - 1e-6);
  CHECK(gamma_kernel(t, t, dt) > 0.0);
}

TEST_CASE("gamma transform of an exponential") {
  const double t = 40 * kUs, dt = 5 * kUs;
  for (cplx kappa : {cplx(1e4, 0.0), cplx(2e3, 3e5)}) {
    const double re = convolve_numeric([&](double x) { return std::exp(-kappa * x).real(); }, t, dt);
    const double im = convolve_numeric([&](double x) { return std::exp(-kappa * x).imag(); }, t, dt);
    const cplx closed = gamma_transform(kappa, t, dt);
    CHECK(std::abs(closed - std::pow(1.0 + kappa * dt, -t / dt)) <= 1e-14);
    CHECK(std::abs(closed - cplx(re, im)) <= 1e-9);
  }
}

TEST_CASE("convolved probability") {
  const auto p = params();
  const auto oc = reference_rates();
  const GaussianProfile prof{};

  SUBCASE("vanishing width recovers the sharp curve") {
    for (double t : {0.0, 13 * kUs, 150 * kUs})
      CHECK(std::abs(convolve_pg(oc, p, prof, 1e-9 * kUs, t).value - opencavity_pg(oc, p, t, prof).value) <= 1e-8);
    CHECK(convolve_pg(oc, p, prof, 0.0, 77 * kUs).value == opencavity_pg(oc, p, 77 * kUs, prof).value);
  }
  SUBCASE("closed form against quadrature") {
    for (double dt : {0.1, 0.5, 2.37, 5.0}) {
      for (double t : {10 * kUs, 95 * kUs, 300 * kUs}) {
        CAPTURE(dt);
        CAPTURE(t);
        const double closed = convolve_pg(oc, p, prof, dt * kUs, t).value;
        const double quad = convolve_numeric([&](double s) { return opencavity_pg(oc, p, s, prof).value; }, t,
                                             dt * kUs);
        CHECK(std::abs(closed - quad) <= 1e-6);
        CHECK(closed >= 0.0);
        CHECK(closed <= 1.0);
      }
    }
  }
  SUBCASE("blur does not grow the oscillation") {
    const double t = 120 * kUs;
    const double period = kPi / phase_coupling(p.g, prof);
    // half the peak-to-peak swing over one phase period starting at t
    auto swing = [&](double dt) {
      double lo = 1.0, hi = 0.0;
      for (int k = 0; k <= 80; ++k) {
        const double s = t + period * k / 80.0;
        const double v = dt > 0.0 ? convolve_pg(oc, p, prof, dt, s).value : opencavity_pg(oc, p, s, prof).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      return 0.5 * (hi - lo);
    };
    double previous = swing(0.0);
    for (double dt : {0.5, 1.0, 2.37, 5.0}) {
      const double amp = swing(dt * kUs);
      CHECK(amp <= previous);
      previous = amp;
    }
  }
  SUBCASE("lossless and uncoupled is constant") {
    PhysicalParams q = p;
    q.g = 1e-300;
    CHECK(std::abs(convolve_pg({}, q, ConstantProfile{}, 2.37 * kUs, 50 * kUs).value) <= 1e-12);
  }
  SUBCASE("degenerate rates take the quadrature path") {
    const double g = p.g;
    const OpenCavityParams deg{0.05 * g, 0.05 * g, 0.0466 * 0.05 * g, 0.0466};
    const auto r = convolve_pg(deg, p, ConstantProfile{}, 2 * kUs, 30 * kUs);
    CHECK(r.fallback);
    CHECK(r.value >= 0.0);
    CHECK(r.value <= 1.0);
  }
}

TEST_CASE("convolved energy") {
  const auto p = params();
  const auto oc = reference_rates();
  CHECK(convolve_energy(oc, p, 1e-12, 30e-3).value == doctest::Approx(energy_mean(oc, p, 30e-3).value).epsilon(1e-10));
  const double floor = energy_mean(oc, p, 1e3).value;
  for (double t = 0.0; t <= 500 * kUs; t += 25 * kUs) {
    const double sharp = energy_mean(oc, p, t).value - floor;
    const double blurred = convolve_energy(oc, p, 5 * kUs, t).value - floor;
    CHECK(std::abs(blurred - sharp) <= 0.01 * std::abs(sharp));
  }
}
