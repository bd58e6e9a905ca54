#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace sieval::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kIo = 3 };

// Runs one `sieval` invocation. `args` excludes the program name. Machine
// output goes to `out`; diagnostics and summaries go to `err`.
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// Edit distance used for "did you mean" suggestions.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace sieval::cli
