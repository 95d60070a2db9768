#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace narrativeforge {

// Exit codes: 0 success, 1 pipeline error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitUsage = 2;

/// Headless driver. `args` excludes the program name. Results go to `out`;
/// failures are written to `err` as a problem-detail JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace narrativeforge
