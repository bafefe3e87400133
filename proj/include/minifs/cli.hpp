#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace minifs::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNoMiniFs = 3;
inline constexpr int kExitNotFound = 4;
inline constexpr int kExitInvalid = 5;

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace minifs::cli
