#pragma once

#include <stdexcept>
#include <string>

namespace vrabi {

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or command line; carries the field or position.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the adaptive integrator when the step size underflows.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double failing_time)
      : std::runtime_error(what), time_(failing_time) {}
  double failing_time() const noexcept { return time_; }

 private:
  double time_;
};

/// Raised when the Gauss-Newton normal matrix of a fit is singular.
/// `combination()` names the flat parameter direction, e.g. "gamma3" or
/// "0.707*gamma1 - 0.707*gamma2".
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, std::string combination)
      : std::runtime_error(what), combination_(std::move(combination)) {}
  const std::string& combination() const noexcept { return combination_; }

 private:
  std::string combination_;
};

}  // namespace vrabi
