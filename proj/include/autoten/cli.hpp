#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace autoten::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name. Subcommands:
/// synth, decompose, corcondia, scan, experiment.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace autoten::cli
