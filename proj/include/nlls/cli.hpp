#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlls {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

// Runs one command line (without the program name). Normal output goes to
// `out` as "key: value" lines; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace nlls
