#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ihoc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNotConverged = 3,
  kSweepFailed = 4,
};

/// Runs the command line (without the program name). Data goes to `out`, or
/// to the --out file when given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ihoc::cli
