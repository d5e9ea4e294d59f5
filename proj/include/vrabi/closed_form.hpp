#pragma once

// Analytic solutions of the four models, all starting from |e,0><e,0|.

#include <array>
#include <vector>

#include "vrabi/core.hpp"
#include "vrabi/geometry.hpp"
#include "vrabi/models.hpp"

namespace vrabi {

// --- phenomenological model, T = 0 --------------------------------------

/// Sign of gamma^2 - 16 g^2.
enum class Regime { Oscillatory, Critical, Overdamped };

struct PhenomT0Solution {
  DensityMatrix rho;  // Bare
  Regime regime;
};

/// Exact solution written with entire functions of (gamma^2 - 16 g^2) t^2, so
/// one expression covers both sides of the critical point.
PhenomT0Solution phenom_t0_rho(double g, double gamma, double t);
BareProbabilities phenom_t0_probs(double g, double gamma, double t);

// --- microscopic model at T = 0 ------------------------------------------

DensityMatrix scala_rho(double g, double gamma1, double gamma2, double t);  // Dressed
double scala_pg(double g, double gamma1, double gamma2, double t);

// --- open-cavity model ------------------------------------------------------

/// Eigen-decomposition of the open-cavity generator.
/// operators[0..2] are the diagonal eigenoperators rho_1..rho_3,
/// operators[3..8] are |+><-|, |+><0|, |-><0|, |-><+|, |0><+|, |0><-|.
struct DampingBasis {
  std::array<ComplexMatrix, 9> operators;
  std::array<cplx, 9> eigenvalues;
  std::array<cplx, 3> x, y, z;
  cplx S;
  bool degenerate = false;
  /// false where the textbook components vanish identically and the vector was
  /// recomputed as a null vector of the population block.
  std::array<bool, 3> from_formula{true, true, true};
};

DampingBasis damping_basis(const DecayRates& rates, const PhysicalParams& p, Frame frame = Frame::Rotating);

/// Open-cavity rates with gamma_a = eps gamma1, gamma_b = eps gamma2,
/// gamma_c = gamma3.
struct OpenCavityParams {
  double gamma1 = 0, gamma2 = 0, gamma3 = 0, eps = 0;

  void validate() const;
  DecayRates rates() const { return DecayRates::simplified(gamma1, gamma2, gamma3, eps); }
  /// gamma3 = eps gamma1, gamma2 gamma3 + gamma1 (gamma2 + gamma3) = 0 or
  /// S = 0 make the closed form singular.
  bool degenerate() const;
};

/// |e,0><e,0| = sum A_i rho_i over i in {1,2,3,4,7}.
struct InitialDecomposition {
  cplx a1, a2, a3, a4, a7;
};
InitialDecomposition initial_decomposition(const OpenCavityParams& oc);

/// Real part of constant + sum amplitude * exp(-rate t).
struct ExpSum {
  struct Term {
    cplx amplitude;
    cplx rate;
  };
  double constant = 0.0;
  std::vector<Term> terms;

  double at(double t) const;
};

/// p_g(t) as an exponential sum; requires non-degenerate rates.
ExpSum opencavity_pg_terms(const OpenCavityParams& oc, const PhysicalParams& p,
                           const CouplingProfile& profile = ConstantProfile{});
/// Tr(Omega_S rho(t)) as an exponential sum; requires non-degenerate rates.
ExpSum energy_terms(const OpenCavityParams& oc, const PhysicalParams& p);

template <class T>
struct Evaluation {
  T value;
  bool fallback = false;
};

Evaluation<DensityMatrix> opencavity_rho(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                         const CouplingProfile& profile = ConstantProfile{});
Evaluation<double> opencavity_pg(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                 const CouplingProfile& profile = ConstantProfile{});
/// Tr(Omega_S rho(t)) in rad/s.
Evaluation<double> energy_mean(const OpenCavityParams& oc, const PhysicalParams& p, double t);

/// (1+eps)/(1+2eps)
double opencavity_pg_limit(double eps);

/// State from exp(L t) applied to |e,0><e,0|, with g replaced by the profile's
/// phase coupling.
DensityMatrix opencavity_rho_numeric(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                     const CouplingProfile& profile = ConstantProfile{});

// --- thermal fitting formulas ---------------------------------------------

enum class BruneVariant {
  EffTime,   // t is effective time, damping gamma t_eff
  TrueTime,  // t is true time, phase with g_eff
  Rescaled,  // t is effective time, damping gamma t_eff / (sqrt(pi) w/d)
};

/// 1 - (1/2) sum_n P(n) (1 + e^{-gamma tau} cos(2 g sqrt(n+1) tau)), P thermal.
double brune_fit_formula(BruneVariant variant, double gamma, double g, double nbar, const CavityGeometry& geom,
                         double t);

}  // namespace vrabi
