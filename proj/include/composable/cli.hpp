#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace composable {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int rejected_apps = 1;
inline constexpr int invalid_input = 2;
} // namespace exit_code

/// Entry point behind the `composable` executable. Subcommands: generate,
/// solve, sweep, report. Returns the process exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace composable
