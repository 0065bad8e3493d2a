#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace somos::cli {

// Exit codes: 0 success, 1 verification or statistical failure, 2 usage or
// input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Relative --output paths are resolved against this directory when set.
inline constexpr const char* kOutputDirEnv = "SOMOS_OUTPUT_DIR";

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace somos::cli
