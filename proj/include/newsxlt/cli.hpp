#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace newsxlt::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsageOrIo = 1, kCoverage = 2 };

/// Runs the multiplexed command line. `args` excludes the program name.
/// Data goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newsxlt::cli
