#pragma once

// Time-grid curves built from the point evaluators.

#include <vector>

#include "vrabi/dephase.hpp"
#include "vrabi/evolve.hpp"
#include "vrabi/grid.hpp"

namespace vrabi {

/// start, start + step, ... up to end inclusive (within step/1e9).
std::vector<double> time_grid(double start, double end, double step);

/// p_g after an n-step Gaussian crossing of duration t, one crossing per t.
std::vector<double> nstep_pg_curve(const ModelKind& kind, const PhysicalParams& p, const CouplingProfile& profile,
                                   const std::vector<double>& times, std::size_t n,
                                   Execution exec = Execution::Parallel);

std::vector<double> opencavity_pg_curve(const OpenCavityParams& oc, const PhysicalParams& p,
                                        const CouplingProfile& profile, const std::vector<double>& times,
                                        Execution exec = Execution::Parallel);

/// Kernel-averaged p_g, closed form term by term.
std::vector<double> convolved_pg_curve(const OpenCavityParams& oc, const PhysicalParams& p,
                                       const CouplingProfile& profile, double delta_t,
                                       const std::vector<double>& times, Execution exec = Execution::Parallel);

/// Kernel-averaged p_g by adaptive quadrature.
std::vector<double> quadrature_pg_curve(const OpenCavityParams& oc, const PhysicalParams& p,
                                        const CouplingProfile& profile, double delta_t,
                                        const std::vector<double>& times, Execution exec = Execution::Parallel);

}  // namespace vrabi
