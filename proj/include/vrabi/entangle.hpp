#pragma once

// Peres-Horodecki analysis of the atom-photon state.

#include <array>

#include "vrabi/closed_form.hpp"

namespace vrabi {

/// Bare 3-level state placed in Bare4 with a zero |e,1> row and column.
DensityMatrix embed4(const DensityMatrix& rho3);

struct PptSpectrum {
  /// lambda1 = <g,1|rho|g,1>, lambda2 = <e,0|rho|e,0>, lambda3 >= 0 >= lambda4
  /// when closed_form; otherwise the numeric spectrum in descending order.
  std::array<double, 4> lambda;
  bool closed_form = true;
};

/// Closed-form eigenvalues of the partial transpose when rho4 has the
/// sparsity of an embedded single-excitation state; numeric otherwise.
PptSpectrum ppt_spectrum(const DensityMatrix& rho4);
std::array<double, 4> ppt_spectrum_numeric(const DensityMatrix& rho4);

struct CoherenceReport {
  cplx value;          // <e,0|rho(t)|g,1> from the damping-basis solution
  cplx printed;        // printed_coherence_formula at the same rates
  double deviation;    // |value - printed|
  bool fallback = false;
};

/// Ground truth: opencavity_rho transformed to the bare basis.
CoherenceReport coherence_e0_g1(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                const CouplingProfile& profile = ConstantProfile{});

/// (1/4) e^{-g2 t/2} (g1 - g2 + 2 g3) (e^{-(g1-g2+g3) t/2} - 1)/(g1 - g2 + g3)
///   + (i/2) e^{-(g1+g2+g3) t/4} sin(2 g t).
/// Exact for the generator with gamma_a = gamma_b = gamma_c = 0.
cplx printed_coherence_formula(double gamma1, double gamma2, double gamma3, double g, double t);

}  // namespace vrabi
