#pragma once

// Command-line front end: simulate | train | moduli | verify.

#include <iosfwd>
#include <string>
#include <vector>

namespace homeo::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kParse = 2, kNumerical = 3 };

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homeo::cli
