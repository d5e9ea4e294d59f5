#pragma once

// Averaging over an uncertain interaction time with a gamma-distributed
// kernel of mean t and variance t * delta_t.

#include <functional>

#include "vrabi/closed_form.hpp"

namespace vrabi {

/// exp(-t'/dt) (t'/dt)^(t/dt - 1) / (dt Gamma(t/dt)); needs t > 0, dt > 0.
double gamma_kernel(double t, double t_prime, double delta_t);

/// int_0^inf kernel(t, t') exp(-kappa t') dt' = (1 + kappa dt)^(-t/dt).
cplx gamma_transform(cplx kappa, double t, double delta_t);

/// Adaptive Gauss-Kronrod quadrature of kernel * f over [0, t + 12 sqrt(t dt) + 40 dt].
double convolve_numeric(const std::function<double(double)>& f, double t, double delta_t, double rel_tol = 1e-10);

/// Kernel-averaged exponential sum, term by term.
double convolve(const ExpSum& sum, double t, double delta_t);

/// Kernel-averaged ground-state probability. Degenerate rates use quadrature
/// of the numerical p_g.
Evaluation<double> convolve_pg(const OpenCavityParams& oc, const PhysicalParams& p, const CouplingProfile& profile,
                               double delta_t, double t);
Evaluation<double> convolve_energy(const OpenCavityParams& oc, const PhysicalParams& p, double delta_t, double t);

}  // namespace vrabi
