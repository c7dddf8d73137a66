#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pvfc::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kRuntime = 2 };

/// Runs the command line `args` (args[0] is the program name). Diagnostics go
/// to `err`; only verify-weather and --help print to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pvfc::cli
