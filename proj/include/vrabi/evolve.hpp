#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "vrabi/core.hpp"
#include "vrabi/geometry.hpp"
#include "vrabi/models.hpp"

namespace vrabi {

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Times at which states are recorded; must be ascending within [0, t_end].
  /// Empty means {0, t_end}.
  std::vector<double> output_times;
  std::size_t max_steps = 20'000'000;
};

/// Worst values seen over every accepted step.
struct TrajectoryStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_trace_drift = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 1.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::string model;
  TrajectoryStats stats;
};

/// Fills the 9x9 generator at time t.
using GeneratorAt = std::function<void(double t, ComplexMatrix& out)>;

/// Dormand-Prince 5(4) with per-step error control
/// |err_i| <= atol + rtol * max(|y_i|, |y_new_i|). Throws IntegrationError on
/// step-size underflow.
Trajectory integrate(const GeneratorAt& generator, const std::string& model, const DensityMatrix& rho0, double t_end,
                     const IntegrateOptions& options = {});
Trajectory integrate(const Liouvillian& l, const DensityMatrix& rho0, double t_end,
                     const IntegrateOptions& options = {});

/// g(t') = g exp(-v^2 (t/2 - t')^2 / w^2) with v = d / t_total unless the
/// geometry carries a velocity.
double gaussian_coupling(double g_peak, const CavityGeometry& geom, double t_total, double t_prime);

/// t_eff = sqrt(pi) (w/d) t
double effective_time(double t, const CavityGeometry& geom);
double true_time(double t_eff, const CavityGeometry& geom);

/// Product of n frozen-coupling propagators exp(L(g_j) t/n), g_j sampled at
/// the interval midpoints.
DensityMatrix nstep_propagate(const ModelKind& kind, const PhysicalParams& p, const CouplingProfile& profile,
                              const DensityMatrix& rho0, double t, std::size_t n);

/// RK reference for a Gaussian crossing of duration t_total.
DensityMatrix integrate_gaussian(const ModelKind& kind, const PhysicalParams& p, const CavityGeometry& geom,
                                 const DensityMatrix& rho0, double t_total, const IntegrateOptions& options = {},
                                 TrajectoryStats* stats = nullptr);

}  // namespace vrabi
