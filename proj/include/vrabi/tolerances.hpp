#pragma once

namespace vrabi::tol {

// Input validation: Hermiticity, trace and positivity of user-supplied states.
inline constexpr double kValidation = 1e-10;

// Allowed drift of any propagated state (trace, Hermiticity, min eigenvalue).
inline constexpr double kDrift = 1e-9;

// Entrywise agreement between two algebraic routes to the same generator.
inline constexpr double kGeneratorMatch = 1e-12;

// Eigen-relation and commutation defects.
inline constexpr double kEigenDefect = 1e-10;

}  // namespace vrabi::tol
