#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mbt {

enum ExitCode : int { kExitOk = 0, kExitTestFailures = 1, kExitUsage = 2, kExitInvalid = 3 };

/// Entry point of the `mbt` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mbt
