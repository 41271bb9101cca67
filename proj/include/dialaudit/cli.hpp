#pragma once

// CLI entry point, exposed as a library function so tests can drive the
// binary in-process. Exit codes: 0 success, 1 input/config error, 2 internal
// invariant violation.

#include <string>
#include <vector>

namespace dialaudit::cli {

// args are the command-line arguments without the program name.
int run(const std::vector<std::string>& args);

}  // namespace dialaudit::cli
