#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaoslink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Full command-line entry point; args excludes the program name.
/// Output files are written only after the command has succeeded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chaoslink::cli
