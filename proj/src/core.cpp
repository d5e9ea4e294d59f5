#include "vrabi/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vrabi/errors.hpp"

namespace vrabi {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
  if (dim == 0 || dim > kMaxDim)
    throw ValidationError("ComplexMatrix: dimension " + std::to_string(dim) + " out of range");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : ComplexMatrix(rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != dim_) throw ValidationError("ComplexMatrix: ragged initializer");
    std::size_t j = 0;
    for (const auto& v : row) (*this)(i, j++) = v;
    ++i;
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries) {
  ComplexMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::unit(std::size_t dim, std::size_t i, std::size_t j) {
  ComplexMatrix m(dim);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

cplx ComplexMatrix::trace() const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
  return s;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

bool ComplexMatrix::is_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw ValidationError("ComplexMatrix: dimension mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw ValidationError("ComplexMatrix: dimension mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("ComplexMatrix: dimension mismatch in *");
  const std::size_t n = a.dim();
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b + b * a; }

EigenSystem hermitian_eigen(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  const double scale = std::max(1.0, m.max_abs());
  if (!m.is_finite() || m.hermiticity_defect() > tol::kValidation * scale)
    throw ValidationError("hermitian_eigen: input is not Hermitian");

  ComplexMatrix a = m;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  const double frob = [&] {
    double s = 0.0;
    for (const auto& x : a.entries()) s += std::norm(x);
    return std::sqrt(s);
  }();

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_norm() <= 1e-300 + 1e-17 * frob) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J restricted to (p,q): [[c, s], [-s conj(phase), c conj(phase)]]
        const cplx jpp = c, jpq = s, jqp = -s * std::conj(phase), jqq = c * std::conj(phase);
        // a <- a J
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        // a <- J^dagger a
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
  EigenSystem out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& hermitian) { return hermitian_eigen(hermitian).values.back(); }

std::size_t basis_dim(Basis b) { return b == Basis::Bare4 ? 4 : 3; }

const char* basis_name(Basis b) {
  switch (b) {
    case Basis::Bare: return "bare";
    case Basis::Dressed: return "dressed";
    case Basis::Bare4: return "bare4";
  }
  return "?";
}

DensityMatrix::DensityMatrix(ComplexMatrix m, Basis basis, double tolerance) : m_(std::move(m)), basis_(basis) {
  if (m_.dim() != basis_dim(basis))
    throw ValidationError(std::string("DensityMatrix: dimension does not match basis ") + basis_name(basis));
  if (!m_.is_finite()) throw ValidationError("DensityMatrix: non-finite entries");
  if (hermiticity_defect() > tolerance) throw ValidationError("DensityMatrix: not Hermitian");
  if (trace_drift() > tolerance) throw ValidationError("DensityMatrix: trace differs from one");
  if (min_eigenvalue() < -tolerance) throw ValidationError("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m, Basis basis) {
  DensityMatrix d;
  d.m_ = std::move(m);
  d.basis_ = basis;
  return d;
}

double DensityMatrix::trace_drift() const { return std::abs(m_.trace() - 1.0); }

double DensityMatrix::min_eigenvalue() const {
  // Symmetrize so that tiny propagation asymmetries do not trip the
  // eigensolver's Hermiticity check.
  ComplexMatrix h = (m_ + m_.adjoint()) * 0.5;
  return vrabi::min_eigenvalue(h);
}

ComplexMatrix partial_transpose(const ComplexMatrix& m4) {
  if (m4.dim() != 4) throw ValidationError("partial_transpose: expected a 4x4 matrix");
  ComplexMatrix r(4);
  // index = 2 * atom_bit + photon_bit with |e,1>=0 ... |g,0>=3, i.e. atom bit
  // 0 for e. The bit layout is irrelevant for the permutation below: swap
  // the photon bits of row and column.
  auto idx = [](std::size_t a, std::size_t p) { return 2 * a + p; };
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t a2 = 0; a2 < 2; ++a2)
        for (std::size_t p2 = 0; p2 < 2; ++p2) r(idx(a, p), idx(a2, p2)) = m4(idx(a, p2), idx(a2, p));
  return r;
}

ComplexMatrix partial_transpose(const DensityMatrix& rho4) {
  if (rho4.basis() != Basis::Bare4) throw ValidationError("partial_transpose: state must be in the Bare4 basis");
  return partial_transpose(rho4.matrix());
}

SuperVector vectorize(const ComplexMatrix& rho3) {
  if (rho3.dim() != 3) throw ValidationError("vectorize: expected a 3x3 matrix");
  SuperVector v{};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) v[i + 3 * j] = rho3(i, j);
  return v;
}

ComplexMatrix unvectorize(const SuperVector& v) {
  ComplexMatrix m(3);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) m(i, j) = v[i + 3 * j];
  return m;
}

void apply(const ComplexMatrix& a, const SuperVector& v, SuperVector& out) {
  for (std::size_t i = 0; i < 9; ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < 9; ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
}

namespace {
double inf_norm(const SuperVector& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

void expm_action(const ComplexMatrix& a, double t, SuperVector& v) {
  if (a.dim() != 9) throw ValidationError("expm_action: expected a 9x9 generator");
  double norm = 0.0;
  for (std::size_t i = 0; i < 9; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 9; ++j) row += std::abs(a(i, j));
    norm = std::max(norm, row);
  }
  norm *= std::abs(t);
  const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(norm)));
  const double h = t / static_cast<double>(substeps);

  SuperVector term{}, next{}, sum{};
  for (std::size_t s = 0; s < substeps; ++s) {
    term = v;
    sum = v;
    for (int k = 1; k < 60; ++k) {
      apply(a, term, next);
      const double f = h / k;
      for (std::size_t i = 0; i < 9; ++i) {
        term[i] = next[i] * f;
        sum[i] += term[i];
      }
      if (inf_norm(term) <= 1e-18 * inf_norm(sum)) break;
    }
    v = sum;
  }
}

}  // namespace vrabi
