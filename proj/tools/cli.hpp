#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wikicite::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kConfigError = 3,
  kEndpointFailure = 4,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wikicite::cli
