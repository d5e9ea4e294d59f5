#pragma once

#include <cmath>
#include <optional>
#include <variant>

#include "vrabi/errors.hpp"

namespace vrabi {

/// Gaussian cavity mode crossed by an atom in flight.
struct CavityGeometry {
  double waist = 5.96e-3;     // m
  double diameter = 50e-3;    // m
  std::optional<double> velocity;  // m/s; d / t_total when absent

  void validate() const {
    if (!(waist > 0.0) || !(diameter > 0.0) || !(waist < diameter))
      throw ValidationError("CavityGeometry: need 0 < waist < diameter");
    if (velocity && !(*velocity > 0.0)) throw ValidationError("CavityGeometry: velocity must be > 0");
  }

  /// t_eff / t = sqrt(pi) w / d
  double effective_time_factor() const { return std::sqrt(3.14159265358979323846) * waist / diameter; }
};

struct ConstantProfile {};
struct GaussianProfile {
  CavityGeometry geometry;
};
using CouplingProfile = std::variant<ConstantProfile, GaussianProfile>;

/// Coupling seen by the Rabi phase: g for a constant profile, g sqrt(pi) w/d
/// for the Gaussian one.
inline double phase_coupling(double g, const CouplingProfile& profile) {
  if (const auto* gp = std::get_if<GaussianProfile>(&profile)) return g * gp->geometry.effective_time_factor();
  return g;
}

}  // namespace vrabi
