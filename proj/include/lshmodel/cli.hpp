#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lshmodel::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`, notices and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lshmodel::cli
