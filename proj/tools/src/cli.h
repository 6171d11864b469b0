#ifndef MPBANDIT_TOOLS_CLI_H_
#define MPBANDIT_TOOLS_CLI_H_

#include <iosfwd>

namespace mpbandit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

// Entry point of the `mpbandit` tool. Subcommands: run, sweep, verify,
// estimate-m, replay.
int Main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mpbandit::cli

#endif  // MPBANDIT_TOOLS_CLI_H_
