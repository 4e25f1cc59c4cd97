#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace osa::cli {

enum ExitCode { kOk = 0, kUsage = 1, kSolverFailure = 2, kSimulationFailure = 3 };

/// Runs the `osa` driver on an argument vector (args[0] is the program name).
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace osa::cli
