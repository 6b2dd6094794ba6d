#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cubecolor {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs the command-line interface. Subcommands: features, synth, train,
/// recognize, bench. Returns 0 on success, 2 when flags fail validation
/// and 1 when the work itself fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cubecolor
