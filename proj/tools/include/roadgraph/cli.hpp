#pragma once

#include <ostream>

namespace roadgraph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

// Parses argv (argv[0] is the program name) and runs one subcommand.
// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roadgraph::cli
