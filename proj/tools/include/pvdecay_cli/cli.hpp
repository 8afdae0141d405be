#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pvdecay::cli {

/// Environment variable naming the default directory for inputs and outputs.
inline constexpr const char* kCacheDirEnv = "PVDECAY_CACHE_DIR";

/// Runs one subcommand. `args` excludes the program name. Returns the exit
/// status: 0 ok, 1 usage, 2 data error, 3 numerical failure. Failures print
/// a one-line JSON summary to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pvdecay::cli
