#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace popdens {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

/// `args` excludes the program name. Normal output goes to `out`, warnings
/// and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace popdens
