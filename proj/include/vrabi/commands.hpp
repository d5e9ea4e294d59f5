#pragma once

#include <iosfwd>

namespace vrabi {

/// Exit statuses of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitFit = 4,
};

/// Entry point shared by the `vrabi` binary and the tests. CSV goes to `out`
/// unless the config names an output file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vrabi
