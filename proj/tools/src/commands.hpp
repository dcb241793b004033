#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shield::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags or configuration
  kExitIo = 2,        // unreadable or unwritable files
  kExitInternal = 3,  // invariant violation
};

// Runs one shieldctl invocation. args excludes the program name. The single
// JSON result goes to out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shield::cli
