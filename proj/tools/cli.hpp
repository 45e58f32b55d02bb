#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoa::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoa::cli
