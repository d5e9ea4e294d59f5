#pragma once

// Small dense complex linear algebra for the 3-, 4- and 9-dimensional objects
// of the single-excitation Jaynes-Cummings problem.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "vrabi/tolerances.hpp"

namespace vrabi {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxDim = 16;

/// Square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> entries);
  /// |i><j|
  static ComplexMatrix unit(std::size_t dim, std::size_t i, std::size_t j);

  std::size_t dim() const noexcept { return dim_; }
  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const cplx> entries() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  cplx trace() const;
  double max_abs() const;
  /// max |m - m^dagger|
  double hermiticity_defect() const;
  bool is_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenSystem {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // orthonormal columns, column k pairs with values[k]
};

/// Cyclic complex Jacobi. Throws ValidationError when `m` is not Hermitian to
/// tol::kValidation (relative to max|m| when that exceeds one).
EigenSystem hermitian_eigen(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& hermitian);

/// Order conventions for the density-matrix bases.
///  Bare:    |e,0>, |g,1>, |g,0>
///  Dressed: |Omega_+>, |Omega_->, |Omega_0>
///  Bare4:   |e,1>, |e,0>, |g,1>, |g,0>   (atom index first, e=1, g=0)
enum class Basis { Bare, Dressed, Bare4 };

std::size_t basis_dim(Basis b);
const char* basis_name(Basis b);

/// Hermitian, unit-trace, positive semidefinite matrix tagged with its basis.
class DensityMatrix {
 public:
  /// Validates Hermiticity, trace and positivity to `tolerance`.
  DensityMatrix(ComplexMatrix m, Basis basis, double tolerance = tol::kValidation);

  /// Skips validation; for states produced by propagators whose hygiene is
  /// checked separately.
  static DensityMatrix unchecked(ComplexMatrix m, Basis basis);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Basis basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return m_.dim(); }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  double trace_drift() const;
  double hermiticity_defect() const { return m_.hermiticity_defect(); }
  double min_eigenvalue() const;

 private:
  DensityMatrix() = default;
  ComplexMatrix m_;
  Basis basis_ = Basis::Bare;
};

/// Partial transpose of a two-qubit (atom x photon) matrix in Bare4 order,
/// transposing the photon index: <a p|r|a' p'> = <a p'|m|a' p>.
ComplexMatrix partial_transpose(const ComplexMatrix& m4);
ComplexMatrix partial_transpose(const DensityMatrix& rho4);

// --- superoperator helpers (3x3 density matrices, column stacking) --------

using SuperVector = std::array<cplx, 9>;

/// vec(rho)[i + 3 j] = rho(i, j)
SuperVector vectorize(const ComplexMatrix& rho3);
ComplexMatrix unvectorize(const SuperVector& v);

/// out = A v for a 9x9 A.
void apply(const ComplexMatrix& a, const SuperVector& v, SuperVector& out);

/// v <- exp(A t) v by scaled Taylor series. Valid for any 9x9 A, including
/// defective ones.
void expm_action(const ComplexMatrix& a, double t, SuperVector& v);

}  // namespace vrabi
