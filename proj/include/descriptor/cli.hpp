#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace descriptor::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kToleranceEnv = "DESCRIPTOR_SOLVE_TOL";

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kNumericalFailure = 3,
  kNotConsistent = 4,
  kInsufficientHorizon = 5,
};

/// Runs `descriptor_solve` with `args` (program name excluded). Data goes to
/// `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace descriptor::cli
