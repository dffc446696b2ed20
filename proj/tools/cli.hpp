#pragma once

#include <ostream>
#include <span>
#include <string>

namespace freehull::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndetermined = 2;

// Runs one subcommand. args excludes the program name. The JSON report goes
// to out, diagnostics to err.
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace freehull::cli
