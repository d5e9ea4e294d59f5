#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "vrabi/errors.hpp"

using namespace vrabi;

TEST_CASE("hermitian_eigen on small examples") {
  SUBCASE("identity") {
    const auto e = hermitian_eigen(ComplexMatrix::identity(3));
    for (double v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("diagonal sorted descending") {
    const double d[] = {3.0, 1.0, 2.0};
    const auto e = hermitian_eigen(ComplexMatrix::diagonal(d));
    CHECK(e.values[0] == doctest::Approx(3.0));
    CHECK(e.values[1] == doctest::Approx(2.0));
    CHECK(e.values[2] == doctest::Approx(1.0));
  }
  SUBCASE("pauli x") {
    const auto e = hermitian_eigen(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}});
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(-1.0));
  }
  SUBCASE("non-Hermitian input is rejected") {
    CHECK_THROWS_AS(hermitian_eigen(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), ValidationError);
  }
}

TEST_CASE("hermitian_eigen reconstructs random inputs") {
  std::mt19937_64 rng(7);
  for (std::size_t dim : {2u, 3u, 4u, 9u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const ComplexMatrix m = testing::random_hermitian(dim, rng);
      const auto e = hermitian_eigen(m);
      ComplexMatrix d(dim);
      for (std::size_t k = 0; k < dim; ++k) d(k, k) = e.values[k];
      CHECK(max_abs_diff(e.vectors * d * e.vectors.adjoint(), m) <= 1e-10);
      CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(dim)) <= 1e-12);
      for (std::size_t k = 1; k < dim; ++k) CHECK(e.values[k - 1] >= e.values[k]);
    }
  }
}

TEST_CASE("partial_transpose") {
  SUBCASE("maximally mixed state is invariant") {
    const ComplexMatrix m = ComplexMatrix::identity(4) * 0.25;
    CHECK(partial_transpose(m) == m);
  }
  SUBCASE("Bell-type projector has eigenvalue -1/2") {
    ComplexMatrix p(4);
    // (|e,0> + |g,1>)/sqrt2 in Bare4 order
    p(1, 1) = p(2, 2) = p(1, 2) = p(2, 1) = 0.5;
    const DensityMatrix rho(p, Basis::Bare4);
    CHECK(min_eigenvalue(partial_transpose(rho)) == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("coherences move to the anti-diagonal corners") {
    ComplexMatrix m(4);
    m(1, 1) = 0.3;
    m(2, 2) = 0.5;
    m(3, 3) = 0.2;
    m(1, 2) = cplx(0.1, 0.2);
    m(2, 1) = cplx(0.1, -0.2);
    const ComplexMatrix r = partial_transpose(m);
    CHECK(r(0, 3) == m(1, 2));
    CHECK(r(3, 0) == m(2, 1));
    CHECK(r(1, 2) == cplx(0.0));
    CHECK(r(1, 1) == m(1, 1));
    CHECK(r.hermiticity_defect() == 0.0);
  }
  SUBCASE("involution") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 10; ++rep) {
      const ComplexMatrix m = testing::random_hermitian(4, rng);
      CHECK(partial_transpose(partial_transpose(m)) == m);
    }
  }
  SUBCASE("wrong dimension") { CHECK_THROWS_AS(partial_transpose(ComplexMatrix::identity(3)), ValidationError); }
}

TEST_CASE("DensityMatrix validation") {
  CHECK_NOTHROW(DensityMatrix(ComplexMatrix::unit(3, 0, 0), Basis::Bare));
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::identity(3), Basis::Bare), ValidationError);
  const double d[] = {1.5, -0.5, 0.0};
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::diagonal(d), Basis::Bare), ValidationError);
  ComplexMatrix nh = ComplexMatrix::unit(3, 0, 0);
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(nh, Basis::Bare), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::unit(4, 0, 0), Basis::Bare), ValidationError);
}

TEST_CASE("vectorize and expm_action") {
  std::mt19937_64 rng(3);
  const ComplexMatrix rho = testing::random_hermitian(3, rng);
  CHECK(unvectorize(vectorize(rho)) == rho);
  CHECK(vectorize(rho)[1 + 3 * 2] == rho(1, 2));

  // exp of a diagonal generator
  ComplexMatrix a(9);
  for (std::size_t k = 0; k < 9; ++k) a(k, k) = cplx(-0.1 * double(k), 0.3 * double(k));
  SuperVector v;
  v.fill(1.0);
  expm_action(a, 2.0, v);
  for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(v[k] - std::exp(a(k, k) * 2.0)) <= 1e-13);

  // nilpotent (defective) generator: exp(N t) = 1 + N t
  ComplexMatrix nil(9);
  nil(0, 1) = 1.0;
  SuperVector w{};
  w[1] = 1.0;
  expm_action(nil, 3.0, w);
  CHECK(std::abs(w[0] - 3.0) <= 1e-13);
  CHECK(std::abs(w[1] - 1.0) <= 1e-13);
}
