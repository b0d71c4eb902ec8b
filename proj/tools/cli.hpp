#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdarb::cli {

enum ExitCode : int { Ok = 0, InputError = 1, SolverError = 2, PropertyViolation = 3 };

/// Runs one command line (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdarb::cli
