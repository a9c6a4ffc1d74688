#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cpvl {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_runtime = 2, exit_inconclusive = 3 };

/// Command-line entry point; args excludes the program name. Artifacts go to
/// the output directory, progress and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpvl
