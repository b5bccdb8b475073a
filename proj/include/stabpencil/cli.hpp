#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stabpencil {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitParse = 3,
  kExitValidation = 4,
  kExitFailure = 5,
};

/// Entry point of the `stabpencil` tool; `args` excludes the program name.
int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace stabpencil
