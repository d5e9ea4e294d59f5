#include <cmath>

#include "doctest.h"
#include "vrabi/davies.hpp"
#include "vrabi/errors.hpp"

using namespace vrabi;

namespace {

PhysicalParams cold() {
  PhysicalParams p = PhysicalParams::reference();
  p.temperature = 0.0;
  return p;
}

const DaviesOperator* find_op(const std::vector<DaviesOperator>& ops, DressedLevel to, DressedLevel from) {
  for (const auto& op : ops)
    for (const auto& [t, f] : op.transitions)
      if (t.manifold == to.manifold && t.sign == to.sign && f.manifold == from.manifold && f.sign == from.sign)
        return &op;
  return nullptr;
}

double element(const std::vector<DaviesOperator>& ops, DressedLevel to, DressedLevel from) {
  const DaviesOperator* op = find_op(ops, to, from);
  REQUIRE(op != nullptr);
  return std::abs(op->op(dressed_index(to), dressed_index(from)));
}

double gap(const Liouvillian& a, const Liouvillian& b) {
  return max_abs_diff(a.matrix(), b.matrix()) / std::max(a.matrix().max_abs(), b.matrix().max_abs());
}

}  // namespace

TEST_CASE("decomposition coefficients") {
  const PhysicalParams p = PhysicalParams::reference();
  const double alpha = 0.8, beta = 0.6;
  const auto ops = davies_decompose(alpha, beta, 3, p);
  const DressedLevel ground{0, 0}, p1{1, +1}, m1{1, -1}, p2{2, +1}, m2{2, -1};

  CHECK(element(ops, ground, p1) == doctest::Approx(alpha / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(element(ops, ground, m1) == doctest::Approx(alpha / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(element(ops, p1, p2) == doctest::Approx(alpha / 2 * (std::sqrt(2.0) + 1)).epsilon(1e-14));
  CHECK(element(ops, m1, m2) == doctest::Approx(alpha / 2 * (std::sqrt(2.0) + 1)).epsilon(1e-14));
  CHECK(element(ops, p1, m2) == doctest::Approx(alpha / 2 * (std::sqrt(2.0) - 1)).epsilon(1e-14));
  CHECK(element(ops, m1, p1) == doctest::Approx(beta / 2).epsilon(1e-14));

  const DaviesOperator* a = find_op(ops, ground, p1);
  CHECK(a->bohr_frequency == doctest::Approx(p.omega0 + p.g).epsilon(1e-15));
  CHECK(a->transitions.size() == 1);
}

TEST_CASE("operator properties") {
  const PhysicalParams p = PhysicalParams::reference();
  const auto ops = davies_decompose(0.8, 0.6, 3, p);
  ComplexMatrix sum(davies_dim(3));
  for (const auto& op : ops) {
    CHECK(commutation_defect(op, p, Frame::Rotating) <= 1e-10 * p.g);
    sum += op.op;
    // A(-omega) = A(omega)^dagger
    bool paired = false;
    for (const auto& other : ops)
      if (other.excitation_change == -op.excitation_change &&
          std::abs(other.rotating_frequency + op.rotating_frequency) <= 1e-9 * p.g)
        paired = paired || max_abs_diff(other.op, op.op.adjoint()) == 0.0;
    CHECK(paired);
  }
  CHECK(max_abs_diff(sum, interaction_operator(0.8, 0.6, 3)) <= 1e-14);
}

TEST_CASE("assembled generator matches the postulated one") {
  SUBCASE("zero temperature") {
    const PhysicalParams p = cold();
    const double g = p.g, alpha = 0.8, beta = 0.6;
    const auto ops = davies_decompose(alpha, beta, 3, p);
    const auto w = weights_for_rates(17.73, 25.0, 0.07 * g, alpha, beta, p);
    const Liouvillian l = assemble_generator(ops, w, p);
    DecayRates r;
    r.gamma1 = 17.73;
    r.gamma2 = 25.0;
    r.gamma3 = 0.07 * g;
    CHECK(gap(l, build_liouvillian(OpenCavity{r}, p)) <= 1e-12);
    const DecayRates mapped = davies_rates(alpha, beta, w, p);
    CHECK(mapped.gamma1 == doctest::Approx(17.73).epsilon(1e-14));
    CHECK(mapped.gamma3 == doctest::Approx(0.07 * g).epsilon(1e-14));
    CHECK(mapped.gamma_a == 0.0);
  }
  SUBCASE("alpha = 0 leaves the intra-manifold channel") {
    const PhysicalParams p = cold();
    const auto w = weights_for_rates(0.0, 0.0, 0.07 * p.g, 0.0, 0.6, p);
    const Liouvillian l = assemble_generator(davies_decompose(0.0, 0.6, 3, p), w, p);
    DecayRates r;
    r.gamma3 = 0.07 * p.g;
    CHECK(gap(l, build_liouvillian(OpenCavity{r}, p)) <= 1e-12);
  }
  SUBCASE("beta = 0 is the microscopic model") {
    const PhysicalParams p = cold();
    const auto w = weights_for_rates(17.73, 25.0, 0.0, 0.8, 0.0, p);
    const Liouvillian l = assemble_generator(davies_decompose(0.8, 0.0, 3, p), w, p);
    CHECK(gap(l, build_liouvillian(Microscopic{17.73, 25.0}, p)) <= 1e-12);
  }
  SUBCASE("positive temperature with KMS weights") {
    const PhysicalParams p = PhysicalParams::reference();
    const double g = p.g;
    const auto w = weights_for_rates(17.73, 25.0, 0.07 * g, 0.8, 0.6, p);
    const Liouvillian l = assemble_generator(davies_decompose(0.8, 0.6, 3, p), w, p);
    const DecayRates r = DecayRates::detailed_balance(17.73, 25.0, 0.07 * g, p);
    CHECK(gap(l, build_liouvillian(OpenCavity{r}, p)) <= 1e-12);
  }
}

TEST_CASE("spectral weights") {
  const PhysicalParams p = PhysicalParams::reference();
  SpectralWeights w(p);
  w.set(2.0 * p.g, 3.0);
  CHECK(w.at(0.0) == 0.0);
  CHECK(w.at(2.0 * p.g) == 3.0);
  CHECK(w.at(-2.0 * p.g) == doctest::Approx(3.0 * kms_ratio(2.0 * p.g, p)).epsilon(1e-15));
  CHECK_THROWS_AS(w.at(p.omega0), ValidationError);
  // a missing weight for a present Bohr frequency is an error
  CHECK_THROWS_AS(assemble_generator(davies_decompose(1.0, 1.0, 2, p), w, p), ValidationError);
  CHECK_THROWS_AS(davies_decompose(1.0, 1.0, 0, p), ValidationError);
}
