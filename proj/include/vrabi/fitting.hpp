#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vrabi/closed_form.hpp"
#include "vrabi/geometry.hpp"

namespace vrabi {

// --- generic Levenberg-Marquardt ----------------------------------------------

struct DataPoint {
  double t;
  double y;
  double sigma = 1.0;
};

struct ParameterSpec {
  std::string name;
  double initial;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

using ModelFunction = std::function<double(std::span<const double> params, double t)>;

struct FitProblem {
  ModelFunction model;
  std::vector<DataPoint> data;
  std::vector<ParameterSpec> parameters;

  void validate() const;
};

enum class RankPolicy { Throw, Report };

struct LmOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-8;  // scaled gradient <= tol * (1 + cost)
  double step_tol = 1e-12;     // relative step
  double fd_step = 1e-7;       // relative finite-difference step
  double initial_damping = 1e-3;
  double rank_tol = 1e-14;     // eigenvalue ratio of the scaled normal matrix
  RankPolicy rank_policy = RankPolicy::Throw;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> std_errors;  // infinite along a flat direction
  double cost = 0.0;               // sum of squared weighted residuals
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> cost_history;  // one entry per accepted iterate
  bool rank_deficient = false;
  std::string flat_combination;

  double value(const std::string& name) const;
  double std_error(const std::string& name) const;
};

/// Damped normal equations with Marquardt diagonal scaling, damping x10 on a
/// rejected step and /10 on an accepted one, clamped bounds.
FitResult levenberg_marquardt(const FitProblem& problem, const LmOptions& options = {});

// --- time conventions and experimental series --------------------------------

enum class TimeConvention { True, Effective };
const char* convention_name(TimeConvention c);

struct ExperimentPoint {
  double t_us;
  double p_g;
  double sigma = 0.0;  // 0: unit weight
  double seconds() const { return t_us * 1e-6; }
};

struct ExperimentSeries {
  std::vector<ExperimentPoint> points;
  TimeConvention convention = TimeConvention::True;

  void validate() const;
  bool operator==(const ExperimentSeries&) const = default;
};

inline bool operator==(const ExperimentPoint& a, const ExperimentPoint& b) {
  return a.t_us == b.t_us && a.p_g == b.p_g && a.sigma == b.sigma;
}

// --- Q factor ---------------------------------------------------------------

struct EnergySeries {
  std::vector<double> t;      // s, in the series convention
  std::vector<double> omega;  // mean energy, rad/s
  TimeConvention convention = TimeConvention::True;
};

struct QFit {
  double q;
  FitResult fit;
};

/// Single-parameter fit of (omega(t) - omega(inf)) = omega0/(2eps+1) exp(-omega0 t / Q).
QFit fit_q(const EnergySeries& series, double eps, double omega0, const LmOptions& options = {});

/// Q = 2 omega0 / (gamma (2eps+1)) for true time, times sqrt(pi) w/d for effective time.
double q_from_rate(double gamma, double eps, double omega0, TimeConvention c, const CavityGeometry& geom = {});
double rate_from_q(double q, double eps, double omega0, TimeConvention c, const CavityGeometry& geom = {});

// --- Rabi data ----------------------------------------------------------------

/// Model values for the parameters not being fitted, and starting values for
/// the ones that are.
struct RabiModelConfig {
  PhysicalParams params = PhysicalParams::reference();
  double eps = 0.0466;
  CouplingProfile profile = GaussianProfile{};
  double gamma1 = 17.73;
  double gamma2 = 17.73;
  double gamma3 = 0.0;
  double delta_t = 0.0;  // s

  OpenCavityParams open_cavity() const { return {gamma1, gamma2, gamma3, eps}; }
  CavityGeometry geometry() const;
};

/// Free subset of {gamma1, gamma2, gamma3, delta_t}. With tie_gamma12 the
/// names gamma1/gamma2 both select one shared parameter "gamma12".
struct RabiFitSpec {
  std::vector<std::string> free;
  bool tie_gamma12 = true;
};

/// p_g from the open-cavity closed form (kernel-averaged when delta_t > 0),
/// evaluated at true times. Effective-time series are mapped back first.
FitResult fit_rabi(const ExperimentSeries& series, const RabiModelConfig& config, const RabiFitSpec& spec,
                   const LmOptions& options = {});

/// Same parametrisation against the mean-energy curve (true time).
FitResult fit_energy_rates(const EnergySeries& series, const RabiModelConfig& config, const RabiFitSpec& spec,
                           const LmOptions& options = {});

}  // namespace vrabi
