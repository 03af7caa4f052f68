#pragma once

#include <ostream>

namespace cvxreg {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadFlags = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitNotConverged = 4;
inline constexpr int kExitCheckFailed = 5;

// Entry point for the `cvxreg` tool: subcommands fit, predict, verify, compare
// and synth. Reports go to `out` as JSON (predictions as CSV); diagnostics go
// to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cvxreg
