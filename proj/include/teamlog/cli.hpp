#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace teamlog {

/// Exit codes of the command-line frontend.
enum ExitCode : int { kExitTrue = 0, kExitFalse = 1, kExitError = 2, kExitBudget = 3 };

/// Runs one command. `args` excludes the program name. Reports and error
/// objects go to `out` as JSON; help text also goes to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teamlog
