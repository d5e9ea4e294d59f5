#include "vrabi/entangle.hpp"

#include <cmath>

#include "vrabi/errors.hpp"

namespace vrabi {

namespace {
// Bare4 indices.
constexpr std::size_t kE1 = 0, kE0 = 1, kG1 = 2, kG0 = 3;
}  // namespace

DensityMatrix embed4(const DensityMatrix& rho3) {
  if (rho3.dim() != 3) throw ValidationError("embed4: expected a 3-level state");
  const DensityMatrix bare = rho3.basis() == Basis::Bare ? rho3 : dressed_transform(rho3, Basis::Bare);
  ComplexMatrix m(4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i + 1, j + 1) = bare(i, j);
  return DensityMatrix::unchecked(std::move(m), Basis::Bare4);
}

std::array<double, 4> ppt_spectrum_numeric(const DensityMatrix& rho4) {
  const ComplexMatrix r = partial_transpose(rho4);
  const auto values = hermitian_eigen((r + r.adjoint()) * 0.5).values;
  return {values[0], values[1], values[2], values[3]};
}

PptSpectrum ppt_spectrum(const DensityMatrix& rho4) {
  if (rho4.basis() != Basis::Bare4) throw ValidationError("ppt_spectrum: expected a Bare4 state");
  const auto& m = rho4.matrix();
  const double scale = std::max(1.0, m.max_abs());
  const double tiny = 1e-14 * scale;
  bool sparse = true;
  for (std::size_t i = 0; i < 4 && sparse; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const bool allowed = i == j ? i != kE1 : ((i == kE0 && j == kG1) || (i == kG1 && j == kE0));
      if (!allowed && std::abs(m(i, j)) > tiny) {
        sparse = false;
        break;
      }
    }
  if (!sparse) {
    PptSpectrum s{ppt_spectrum_numeric(rho4), false};
    return s;
  }
  const double r00 = m(kG0, kG0).real();
  const double c2 = std::norm(m(kE0, kG1));
  const double root = std::sqrt(r00 * r00 + 4.0 * c2);
  PptSpectrum s;
  s.lambda[0] = m(kG1, kG1).real();
  s.lambda[1] = m(kE0, kE0).real();
  // Conjugate forms keep both roots accurate when one is tiny.
  if (r00 >= 0.0) {
    s.lambda[2] = 0.5 * (r00 + root);
    s.lambda[3] = r00 + root == 0.0 ? 0.0 : -2.0 * c2 / (r00 + root);
  } else {
    s.lambda[3] = 0.5 * (r00 - root);
    s.lambda[2] = 2.0 * c2 / (root - r00);
  }
  return s;
}

cplx printed_coherence_formula(double gamma1, double gamma2, double gamma3, double g, double t) {
  const double u = gamma1 - gamma2 + gamma3;
  // (e^{-u t/2} - 1)/u, finite at u = 0
  const double ratio = u == 0.0 ? -0.5 * t : std::expm1(-0.5 * u * t) / u;
  const double re = 0.25 * std::exp(-0.5 * gamma2 * t) * (gamma1 - gamma2 + 2.0 * gamma3) * ratio;
  const double im = 0.5 * std::exp(-0.25 * (gamma1 + gamma2 + gamma3) * t) * std::sin(2.0 * g * t);
  return {re, im};
}

CoherenceReport coherence_e0_g1(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                const CouplingProfile& profile) {
  const auto ev = opencavity_rho(oc, p, t, profile);
  CoherenceReport r;
  r.value = vrabi::coherence_e0_g1(ev.value);
  r.printed = printed_coherence_formula(oc.gamma1, oc.gamma2, oc.gamma3, phase_coupling(p.g, profile), t);
  r.deviation = std::abs(r.value - r.printed);
  r.fallback = ev.fallback;
  return r;
}

}  // namespace vrabi
