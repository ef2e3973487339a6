#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvls::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kInfeasible = 2 };

/// Runs one command line (args[0] is the program name). Reports and traces go
/// to `out` unless --out names a file; messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvls::cli
