#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rwsm::cli {

enum ExitCode : int {
  kOk = 0,
  kViolation = 1,  // a checked inequality failed or a condition was refuted
  kUsage = 2,
  kBudget = 3,
};

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// (and to --out when given); one-line diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rwsm::cli
