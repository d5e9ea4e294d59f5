#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vrabi/curves.hpp"

using namespace vrabi;

namespace {
constexpr double kUs = 1e-6;
}

TEST_CASE("time grid") {
  const auto g = time_grid(0.0, 1.0, 0.1);
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(1.0));
  CHECK(time_grid(0.0, 500.0, 1.0).size() == 501);
  CHECK(time_grid(2.0, 3.0, 0.3).size() == 4);
}

TEST_CASE("tabulate keeps grid order and rethrows") {
  std::vector<int> xs(200);
  for (int i = 0; i < 200; ++i) xs[i] = i;
  const auto ys = tabulate(xs, [](int x) { return x * x; });
  for (int i = 0; i < 200; ++i) CHECK(ys[i] == i * i);
  CHECK_THROWS_AS(tabulate(xs,
                           [](int x) {
                             if (x == 137) throw std::runtime_error("boom");
                             return x;
                           }),
                  std::runtime_error);
}

TEST_CASE("serial and parallel curves are identical") {
  const PhysicalParams p = PhysicalParams::reference();
  const OpenCavityParams oc{17.73, 17.73, 0.07 * p.g, 0.0466};
  const GaussianProfile prof{};
  const auto times = time_grid(0.0, 300 * kUs, 10 * kUs);

  const ModelKind kind = OpenCavity{oc.rates()};
  CHECK(nstep_pg_curve(kind, p, prof, times, 101, Execution::Serial) ==
        nstep_pg_curve(kind, p, prof, times, 101, Execution::Parallel));
  CHECK(opencavity_pg_curve(oc, p, prof, times, Execution::Serial) ==
        opencavity_pg_curve(oc, p, prof, times, Execution::Parallel));
  CHECK(convolved_pg_curve(oc, p, prof, 2.37 * kUs, times, Execution::Serial) ==
        convolved_pg_curve(oc, p, prof, 2.37 * kUs, times, Execution::Parallel));
  CHECK(quadrature_pg_curve(oc, p, prof, 2.37 * kUs, times, Execution::Serial) ==
        quadrature_pg_curve(oc, p, prof, 2.37 * kUs, times, Execution::Parallel));
}

TEST_CASE("curves agree with the point evaluators") {
  const PhysicalParams p = PhysicalParams::reference();
  const OpenCavityParams oc{17.73, 17.73, 0.07 * p.g, 0.0466};
  const GaussianProfile prof{};
  const auto times = time_grid(0.0, 200 * kUs, 20 * kUs);
  const auto sharp = opencavity_pg_curve(oc, p, prof, times);
  const auto closed = convolved_pg_curve(oc, p, prof, 2.37 * kUs, times);
  const auto quad = quadrature_pg_curve(oc, p, prof, 2.37 * kUs, times);
  const auto nstep = nstep_pg_curve(OpenCavity{oc.rates()}, p, prof, times, 1001);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(sharp[k] == opencavity_pg(oc, p, times[k], prof).value);
    CHECK(std::abs(closed[k] - quad[k]) <= 1e-6);
    CHECK(std::abs(nstep[k] - sharp[k]) <= 1e-4);
  }
}
