#pragma once

#include <string>
#include <vector>

#include "vrabi/grid.hpp"

namespace vrabi {

struct CriterionResult {
  int id;
  std::string name;
  bool passed;
  std::string detail;
};

/// Runs the fourteen acceptance checks. Tolerances are fixed in the
/// implementation.
std::vector<CriterionResult> run_acceptance(Execution exec = Execution::Parallel);

/// One line per criterion, e.g. "PASS  1 kms-factor  ...".
std::string format_result(const CriterionResult& r);

}  // namespace vrabi
