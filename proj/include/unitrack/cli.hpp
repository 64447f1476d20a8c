#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace unitrack {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Entry point of the `unitrack` tool; `args` excludes the program name.
/// Subcommands: simulate, pe-check, lin-check, compare, basin.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unitrack
