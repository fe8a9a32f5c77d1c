#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hm {

/// Exit codes of the headmotion command line.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitTraining = 3,
  kExitData = 4,
  kExitCalibration = 5,
};

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics to `err`; the return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hm
