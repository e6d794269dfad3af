#pragma once

namespace sclaw::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kInfeasible = 4 };

/// Entry point of the `sclaw` tool.
int run(int argc, const char* const* argv);

}  // namespace sclaw::cli
