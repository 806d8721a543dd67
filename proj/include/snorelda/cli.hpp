#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace snore {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kIo = 2;
inline constexpr int kUsage = 64;
inline constexpr int kData = 65;
inline constexpr int kInternal = 70;
}  // namespace exit_code

/// Runs one command line (args[0] is the program name). Results go to
/// files; human-readable summaries to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace snore
