#pragma once

// Davies jump operators of the coupling alpha (a + a^+) + beta a^+ a in the
// dressed basis of the resonant Jaynes-Cummings Hamiltonian.
//
// Dressed index order on manifolds N <= n_max:
//   0: |Omega_{1,+}>, 1: |Omega_{1,->}, 2: |Omega_0>,
//   3 + 2(N-2): |Omega_{N,+}>, 4 + 2(N-2): |Omega_{N,->}  for N >= 2,
// so the leading 3x3 block is the Dressed basis of the rest of the library.

#include <string>
#include <utility>
#include <vector>

#include "vrabi/core.hpp"
#include "vrabi/models.hpp"

namespace vrabi {

struct DressedLevel {
  int manifold;  // N; 0 for the ground state
  int sign;      // +1, -1; 0 for the ground state
};

std::size_t davies_dim(int n_max);
std::size_t dressed_index(DressedLevel level);
std::string level_name(DressedLevel level);
/// Lab-frame energy N omega0 - omega0/2 + sign sqrt(N) g.
double level_energy(DressedLevel level, const PhysicalParams& p, Frame frame = Frame::Lab);

struct DaviesOperator {
  double bohr_frequency;      // lab frame, rad/s; [Omega_S, A] = -omega A
  double rotating_frequency;  // same relation in the frame rotating at omega0
  int excitation_change;      // manifold lowering, N' - N
  /// Transitions |to><from| grouped into this operator.
  std::vector<std::pair<DressedLevel, DressedLevel>> transitions;
  ComplexMatrix op;
};

/// All A(omega), including omega <= 0, built from the closed-form matrix
/// elements between dressed states.
std::vector<DaviesOperator> davies_decompose(double alpha, double beta, int n_max, const PhysicalParams& p);

/// Pi (alpha (a + a^+) + beta a^+ a) Pi built in the Fock basis and rotated to
/// the dressed basis.
ComplexMatrix interaction_operator(double alpha, double beta, int n_max);

/// max |[Omega_S, A] + omega A| in the given frame.
double commutation_defect(const DaviesOperator& a, const PhysicalParams& p, Frame frame);

/// gamma(omega) for omega > 0; gamma(-omega) = exp(-hbar omega / kT) gamma(omega)
/// and gamma(0) = 0.
class SpectralWeights {
 public:
  explicit SpectralWeights(PhysicalParams params) : params_(params) {}

  void set(double omega, double gamma);
  /// Throws ValidationError when no weight was set for |omega|.
  double at(double omega) const;

 private:
  PhysicalParams params_;
  std::vector<std::pair<double, double>> table_;
};

/// Lindblad generator on the leading 3x3 block: downward gamma(omega) and
/// upward gamma(-omega) terms for every omega > 0 acting there, Lamb shifts
/// dropped.
Liouvillian assemble_generator(const std::vector<DaviesOperator>& ops, const SpectralWeights& weights,
                               const PhysicalParams& p, Frame frame = Frame::Rotating);

/// gamma1 = gamma(w0+g) alpha^2, gamma2 = gamma(w0-g) alpha^2,
/// gamma3 = gamma(2g) beta^2 / 2, upward partners from gamma(-omega).
DecayRates davies_rates(double alpha, double beta, const SpectralWeights& weights, const PhysicalParams& p);

/// Weights reproducing the given downward rates through davies_rates.
SpectralWeights weights_for_rates(double gamma1, double gamma2, double gamma3, double alpha, double beta,
                                  const PhysicalParams& p);

}  // namespace vrabi
