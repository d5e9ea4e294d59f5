#pragma once

// Master-equation generators for a resonant two-level atom coupled to one
// cavity mode, truncated to {|e,0>, |g,1>, |g,0>}.

#include <string>
#include <variant>
#include <vector>

#include "vrabi/core.hpp"

namespace vrabi {

inline constexpr double kPi = 3.14159265358979323846;

struct PhysicalParams {
  double omega0 = 0.0;       // rad/s
  double g = 0.0;            // rad/s
  double temperature = 0.0;  // K
  double hbar = 1.054571817e-34;
  double kB = 1.380649e-23;

  void validate() const;

  /// omega0 = 2pi * 51.099 GHz, g = 47pi * 1e3 rad/s, T = 0.8 K.
  static PhysicalParams reference();
};

/// exp(-hbar omega / kB T); 0 at T = 0.
double kms_ratio(double omega, const PhysicalParams& p);
/// 1 / (exp(hbar omega / kB T) - 1); 0 at T = 0.
double thermal_occupation(double omega, const PhysicalParams& p);

/// Downward rates gamma1 (+ -> 0), gamma2 (- -> 0), gamma3 (+ -> -) and
/// their upward partners gamma_a, gamma_b, gamma_c.
struct DecayRates {
  double gamma1 = 0, gamma2 = 0, gamma3 = 0;
  double gamma_a = 0, gamma_b = 0, gamma_c = 0;

  void validate() const;
  double total() const { return gamma1 + gamma2 + gamma3 + gamma_a + gamma_b + gamma_c; }

  /// gamma_a = eps gamma1, gamma_b = eps gamma2, gamma_c = gamma3.
  static DecayRates simplified(double gamma1, double gamma2, double gamma3, double eps);
  /// Upward rates from the KMS ratio at each Bohr frequency.
  static DecayRates detailed_balance(double gamma1, double gamma2, double gamma3, const PhysicalParams& p);
};

struct PhenomT0 {
  double gamma = 0;
};

struct PhenomT {
  double gamma_down = 0;
  double gamma_up = 0;
  /// gamma_up = kms_ratio(omega0) * gamma_down
  static PhenomT from_kms(double gamma_down, const PhysicalParams& p);
};

struct Microscopic {
  double gamma1 = 0;
  double gamma2 = 0;
};

struct OpenCavity {
  DecayRates rates;
};

using ModelKind = std::variant<PhenomT0, PhenomT, Microscopic, OpenCavity>;

std::string model_name(const ModelKind& kind);
void validate(const ModelKind& kind);
/// Bare for the phenomenological models, Dressed otherwise.
Basis native_basis(const ModelKind& kind);

/// Rotating: frame rotating at omega0, dressed energies (g, -g, 0).
/// Lab: dressed energies (omega0/2 + g, omega0/2 - g, -omega0/2).
enum class Frame { Rotating, Lab };

struct JumpTerm {
  double rate;
  ComplexMatrix op;
};

/// 9x9 matrix of rho -> -i[H, rho] + sum rate (L rho L^+ - {L^+ L, rho}/2).
ComplexMatrix lindblad_matrix(const ComplexMatrix& hamiltonian, const std::vector<JumpTerm>& jumps);

class Liouvillian {
 public:
  Liouvillian(ComplexMatrix matrix, Basis basis, ModelKind kind, Frame frame);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Basis basis() const noexcept { return basis_; }
  const ModelKind& kind() const noexcept { return kind_; }
  Frame frame() const noexcept { return frame_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  /// max_k |sum_i L[(i,i), k]|, zero for a trace-preserving map.
  double trace_row_defect() const;

 private:
  ComplexMatrix matrix_;
  Basis basis_;
  ModelKind kind_;
  Frame frame_;
};

ComplexMatrix system_hamiltonian(Basis basis, const PhysicalParams& p, Frame frame = Frame::Rotating);
std::vector<JumpTerm> jump_terms(const ModelKind& kind);
Liouvillian build_liouvillian(const ModelKind& kind, const PhysicalParams& p, Frame frame = Frame::Rotating);

/// Rotating-frame generator as an affine function of the coupling:
/// L(g) = dissipator + g * coherent.
struct CouplingFamily {
  ComplexMatrix dissipator;
  ComplexMatrix coherent;
  Basis basis;

  ComplexMatrix at(double g) const { return dissipator + coherent * cplx(g); }
};
CouplingFamily coupling_family(const ModelKind& kind);

/// Columns are |Omega_+>, |Omega_->, |Omega_0> in bare coordinates.
ComplexMatrix dressed_unitary();
DensityMatrix dressed_transform(const DensityMatrix& rho, Basis target);
/// |e,0><e,0| expressed in `basis` (Bare or Dressed).
DensityMatrix excited_state(Basis basis);

struct BareProbabilities {
  double e0, g1, g0;
};
BareProbabilities bare_probabilities(const DensityMatrix& rho);
double ground_probability(const DensityMatrix& rho);
/// <e,0|rho|g,1>
cplx coherence_e0_g1(const DensityMatrix& rho);
/// Tr(Omega_S rho) with lab-frame energies.
double mean_energy(const DensityMatrix& rho, const PhysicalParams& p);

}  // namespace vrabi
