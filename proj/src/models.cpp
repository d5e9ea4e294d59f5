#include "vrabi/models.hpp"

#include <cmath>

#include "vrabi/errors.hpp"

namespace vrabi {

namespace {

void require_rate(double r, const char* name) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError(std::string("rate ") + name + " must be finite and >= 0");
}

double hbar_over_kT(const PhysicalParams& p) { return p.hbar / (p.kB * p.temperature); }

// Bare indices.
constexpr std::size_t kE0 = 0, kG1 = 1, kG0 = 2;
// Dressed indices.
constexpr std::size_t kPlus = 0, kMinus = 1, kZero = 2;

}  // namespace

void PhysicalParams::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ValidationError("omega0 must be > 0");
  if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("g must be > 0");
  if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  if (!(hbar > 0.0) || !(kB > 0.0)) throw ValidationError("physical constants must be > 0");
}

PhysicalParams PhysicalParams::reference() {
  PhysicalParams p;
  p.omega0 = 2.0 * kPi * 51.099e9;
  p.g = 47.0 * kPi * 1e3;
  p.temperature = 0.8;
  return p;
}

double kms_ratio(double omega, const PhysicalParams& p) {
  if (p.temperature == 0.0) return 0.0;
  if (std::isinf(p.temperature)) return 1.0;
  return std::exp(-omega * hbar_over_kT(p));
}

double thermal_occupation(double omega, const PhysicalParams& p) {
  if (!(omega > 0.0)) throw ValidationError("thermal_occupation: omega must be > 0");
  if (p.temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(omega * hbar_over_kT(p));
}

void DecayRates::validate() const {
  require_rate(gamma1, "gamma1");
  require_rate(gamma2, "gamma2");
  require_rate(gamma3, "gamma3");
  require_rate(gamma_a, "gamma_a");
  require_rate(gamma_b, "gamma_b");
  require_rate(gamma_c, "gamma_c");
}

DecayRates DecayRates::simplified(double gamma1, double gamma2, double gamma3, double eps) {
  return {gamma1, gamma2, gamma3, eps * gamma1, eps * gamma2, gamma3};
}

DecayRates DecayRates::detailed_balance(double gamma1, double gamma2, double gamma3, const PhysicalParams& p) {
  return {gamma1,
          gamma2,
          gamma3,
          kms_ratio(p.omega0 + p.g, p) * gamma1,
          kms_ratio(p.omega0 - p.g, p) * gamma2,
          kms_ratio(2.0 * p.g, p) * gamma3};
}

PhenomT PhenomT::from_kms(double gamma_down, const PhysicalParams& p) {
  return {gamma_down, kms_ratio(p.omega0, p) * gamma_down};
}

std::string model_name(const ModelKind& kind) {
  struct V {
    std::string operator()(const PhenomT0&) const { return "phenom-t0"; }
    std::string operator()(const PhenomT&) const { return "phenom-t"; }
    std::string operator()(const Microscopic&) const { return "microscopic"; }
    std::string operator()(const OpenCavity&) const { return "open-cavity"; }
  };
  return std::visit(V{}, kind);
}

void validate(const ModelKind& kind) {
  struct V {
    void operator()(const PhenomT0& m) const { require_rate(m.gamma, "gamma"); }
    void operator()(const PhenomT& m) const {
      require_rate(m.gamma_down, "gamma_down");
      require_rate(m.gamma_up, "gamma_up");
    }
    void operator()(const Microscopic& m) const {
      require_rate(m.gamma1, "gamma1");
      require_rate(m.gamma2, "gamma2");
    }
    void operator()(const OpenCavity& m) const { m.rates.validate(); }
  };
  std::visit(V{}, kind);
}

Basis native_basis(const ModelKind& kind) {
  return (std::holds_alternative<PhenomT0>(kind) || std::holds_alternative<PhenomT>(kind)) ? Basis::Bare
                                                                                          : Basis::Dressed;
}

ComplexMatrix lindblad_matrix(const ComplexMatrix& h, const std::vector<JumpTerm>& jumps) {
  const std::size_t n = h.dim();
  if (n != 3) throw ValidationError("lindblad_matrix: expected 3x3 operators");
  const cplx mi(0.0, -1.0);
  ComplexMatrix out(9);
  std::vector<ComplexMatrix> ldl;
  for (const auto& j : jumps) ldl.push_back(j.op.adjoint() * j.op);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t r = 0; r < 3; ++r) {
      const ComplexMatrix e = ComplexMatrix::unit(3, r, c);
      ComplexMatrix img = mi * commutator(h, e);
      for (std::size_t k = 0; k < jumps.size(); ++k) {
        const auto& l = jumps[k].op;
        img += jumps[k].rate * (l * e * l.adjoint() - 0.5 * anticommutator(ldl[k], e));
      }
      const SuperVector col = vectorize(img);
      for (std::size_t i = 0; i < 9; ++i) out(i, r + 3 * c) = col[i];
    }
  return out;
}

Liouvillian::Liouvillian(ComplexMatrix matrix, Basis basis, ModelKind kind, Frame frame)
    : matrix_(std::move(matrix)), basis_(basis), kind_(std::move(kind)), frame_(frame) {
  if (matrix_.dim() != 9) throw ValidationError("Liouvillian: expected a 9x9 matrix");
}

ComplexMatrix Liouvillian::apply(const ComplexMatrix& rho) const {
  SuperVector out;
  vrabi::apply(matrix_, vectorize(rho), out);
  return unvectorize(out);
}

double Liouvillian::trace_row_defect() const {
  double d = 0.0;
  for (std::size_t k = 0; k < 9; ++k) d = std::max(d, std::abs(matrix_(0, k) + matrix_(4, k) + matrix_(8, k)));
  return d;
}

ComplexMatrix system_hamiltonian(Basis basis, const PhysicalParams& p, Frame frame) {
  const double shift = frame == Frame::Lab ? 0.5 * p.omega0 : 0.0;
  ComplexMatrix h(3);
  if (basis == Basis::Dressed) {
    h(kPlus, kPlus) = shift + p.g;
    h(kMinus, kMinus) = shift - p.g;
    h(kZero, kZero) = -shift;
  } else if (basis == Basis::Bare) {
    h(kE0, kE0) = shift;
    h(kG1, kG1) = shift;
    h(kG0, kG0) = -shift;
    h(kE0, kG1) = p.g;
    h(kG1, kE0) = p.g;
  } else {
    throw ValidationError("system_hamiltonian: Bare4 is not a propagation basis");
  }
  return h;
}

std::vector<JumpTerm> jump_terms(const ModelKind& kind) {
  validate(kind);
  struct V {
    std::vector<JumpTerm> operator()(const PhenomT0& m) const {
      return {{m.gamma, ComplexMatrix::unit(3, kG0, kG1)}};
    }
    std::vector<JumpTerm> operator()(const PhenomT& m) const {
      // Pi a Pi and Pi a^+ Pi on the truncated space.
      return {{m.gamma_down, ComplexMatrix::unit(3, kG0, kG1)}, {m.gamma_up, ComplexMatrix::unit(3, kG1, kG0)}};
    }
    std::vector<JumpTerm> operator()(const Microscopic& m) const {
      return {{0.5 * m.gamma1, ComplexMatrix::unit(3, kZero, kPlus)},
              {0.5 * m.gamma2, ComplexMatrix::unit(3, kZero, kMinus)}};
    }
    std::vector<JumpTerm> operator()(const OpenCavity& m) const {
      const auto& r = m.rates;
      return {{0.5 * r.gamma1, ComplexMatrix::unit(3, kZero, kPlus)},
              {0.5 * r.gamma_a, ComplexMatrix::unit(3, kPlus, kZero)},
              {0.5 * r.gamma2, ComplexMatrix::unit(3, kZero, kMinus)},
              {0.5 * r.gamma_b, ComplexMatrix::unit(3, kMinus, kZero)},
              {0.5 * r.gamma3, ComplexMatrix::unit(3, kMinus, kPlus)},
              {0.5 * r.gamma_c, ComplexMatrix::unit(3, kPlus, kMinus)}};
    }
  };
  return std::visit(V{}, kind);
}

Liouvillian build_liouvillian(const ModelKind& kind, const PhysicalParams& p, Frame frame) {
  p.validate();
  const Basis basis = native_basis(kind);
  return Liouvillian(lindblad_matrix(system_hamiltonian(basis, p, frame), jump_terms(kind)), basis, kind, frame);
}

CouplingFamily coupling_family(const ModelKind& kind) {
  const Basis basis = native_basis(kind);
  PhysicalParams unit;
  unit.omega0 = 1.0;
  unit.g = 1.0;
  const ComplexMatrix zero(3);
  return {lindblad_matrix(zero, jump_terms(kind)), lindblad_matrix(system_hamiltonian(basis, unit), {}), basis};
}

ComplexMatrix dressed_unitary() {
  const double s = 1.0 / std::sqrt(2.0);
  // |Omega_+-> = (|g,1> +- |e,0>)/sqrt2
  return ComplexMatrix{{s, -s, 0.0}, {s, s, 0.0}, {0.0, 0.0, 1.0}};
}

DensityMatrix dressed_transform(const DensityMatrix& rho, Basis target) {
  if (rho.dim() != 3 || target == Basis::Bare4) throw ValidationError("dressed_transform: 3-level states only");
  if (rho.basis() == target) throw ValidationError("dressed_transform: source and target basis coincide");
  const ComplexMatrix u = dressed_unitary();
  if (target == Basis::Bare) return DensityMatrix::unchecked(u * rho.matrix() * u.adjoint(), Basis::Bare);
  return DensityMatrix::unchecked(u.adjoint() * rho.matrix() * u, Basis::Dressed);
}

DensityMatrix excited_state(Basis basis) {
  DensityMatrix bare(ComplexMatrix::unit(3, kE0, kE0), Basis::Bare);
  if (basis == Basis::Bare) return bare;
  return dressed_transform(bare, basis);
}

namespace {
ComplexMatrix as_bare(const DensityMatrix& rho) {
  if (rho.basis() == Basis::Bare) return rho.matrix();
  if (rho.basis() == Basis::Dressed) return dressed_transform(rho, Basis::Bare).matrix();
  throw ValidationError("expected a 3-level state");
}
}  // namespace

BareProbabilities bare_probabilities(const DensityMatrix& rho) {
  if (rho.basis() == Basis::Dressed) {
    const auto& m = rho.matrix();
    const double half_sum = 0.5 * (m(kPlus, kPlus).real() + m(kMinus, kMinus).real());
    const double re = 0.5 * (m(kPlus, kMinus).real() + m(kMinus, kPlus).real());
    return {half_sum - re, half_sum + re, m(kZero, kZero).real()};
  }
  const ComplexMatrix b = as_bare(rho);
  return {b(kE0, kE0).real(), b(kG1, kG1).real(), b(kG0, kG0).real()};
}

double ground_probability(const DensityMatrix& rho) {
  const auto pr = bare_probabilities(rho);
  return pr.g1 + pr.g0;
}

cplx coherence_e0_g1(const DensityMatrix& rho) { return as_bare(rho)(kE0, kG1); }

double mean_energy(const DensityMatrix& rho, const PhysicalParams& p) {
  const DensityMatrix d = rho.basis() == Basis::Dressed ? rho : dressed_transform(rho, Basis::Dressed);
  const ComplexMatrix h = system_hamiltonian(Basis::Dressed, p, Frame::Lab);
  double e = 0.0;
  for (std::size_t i = 0; i < 3; ++i) e += h(i, i).real() * d(i, i).real();
  return e;
}

}  // namespace vrabi
