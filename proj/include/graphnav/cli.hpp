#pragma once

#include <string>
#include <vector>

namespace graphnav {

/// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Entry point behind the binary: `args` excludes the program name.
/// Subcommands: gen-world, collect, annotate, train-gln, train-behaviors,
/// eval, report. A JSON config file (--config) supplies defaults; explicit
/// flags win. Every output directory receives a manifest with the effective
/// configuration, seeds, and input/output content hashes.
int run_command(const std::vector<std::string>& args);

}  // namespace graphnav
