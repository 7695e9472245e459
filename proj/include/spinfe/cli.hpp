#pragma once

#include <string>
#include <vector>

namespace spinfe {

// Full command-line entry point: parses subcommand and flags, runs the
// experiment, writes result files under --out-dir.  Returns the process exit
// code: 0 on success, 1 on configuration errors, 2 on numerical
// non-convergence.  args excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace spinfe
