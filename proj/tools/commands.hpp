#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mg1::cli {

enum ExitCode : int { kOk = 0, kViolations = 1, kParseError = 2, kComputationError = 3 };

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mg1::cli
