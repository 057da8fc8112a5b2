#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gplan {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUnsolved = 1, kExitUsage = 2 };

// Runs the `gplan` command line. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gplan
