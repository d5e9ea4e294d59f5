#pragma once

// Run configuration: one JSON document, boundary units (us, 1/s, mm).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vrabi/fitting.hpp"

namespace vrabi {

/// `key=from:to:count`, inclusive, evenly spaced.
struct Sweep {
  std::string key;
  double from = 0.0;
  double to = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const;
  static Sweep parse(const std::string& text);
};

struct RunConfig {
  std::string model = "open-cavity";

  // Rates in 1/s. gamma3 defaults to 0.07 g, eps to the KMS ratio at omega0,
  // gamma_up to the KMS ratio times gamma.
  double gamma = 35.46;
  std::optional<double> gamma_up;
  double gamma1 = 17.73;
  double gamma2 = 17.73;
  std::optional<double> gamma3;
  std::optional<double> eps;

  PhysicalParams params = PhysicalParams::reference();
  double waist_mm = 5.96;
  double diameter_mm = 50.0;
  std::optional<double> velocity;  // m/s

  std::string profile = "gaussian";
  double delta_t_us = 0.0;
  TimeConvention convention = TimeConvention::True;

  double t_start_us = 0.0;
  double t_end_us = 500.0;
  double t_step_us = 1.0;
  std::size_t n_steps = 0;  // > 0: n-step Gaussian propagation instead of closed forms

  std::string output = "-";
  std::string input;

  std::vector<std::string> free{"gamma12", "gamma3"};
  bool tie_gamma12 = true;

  double alpha = 1.0;
  double beta = 1.0;
  int n_max = 3;

  std::optional<Sweep> sweep;

  /// Throws ConfigError for unknown names, ValidationError for bad values.
  void validate() const;

  ModelKind model_kind() const;
  OpenCavityParams open_cavity() const;
  CavityGeometry geometry() const;
  CouplingProfile coupling_profile() const;
  RabiModelConfig rabi_model() const;
  double gamma3_value() const;
  double eps_value() const;
  std::vector<double> grid_us() const;

  /// Copy with one sweepable field replaced.
  RunConfig with(const std::string& key, double value) const;
};

TimeConvention parse_convention(const std::string& text);

/// Parses JSON text; errors name the line and column or the field path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace vrabi
