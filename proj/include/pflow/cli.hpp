#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pflow::cli {

enum ExitCode { kOk = 0, kVerdictFalse = 1, kUsage = 2, kSolverFailure = 3 };

// Parses "inf" / "infinity" or a number >= 1; warns on stderr when p > 1e6 is coerced to inf.
double parse_p(const std::string& text, std::ostream& err);

// Full command-line entry point. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pflow::cli
