#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcid {

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitConfig = 2,  // bad flags, invalid configuration, unreadable/unwritable paths
  kExitParse = 3,
  kExitRankDeficient = 4,
  kExitNonConvergence = 5,
};

// `args` excludes the program name.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace tcid
