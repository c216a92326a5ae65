#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvst::cli {

// Exit codes: 0 success, 1 runtime error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace mvst::cli
