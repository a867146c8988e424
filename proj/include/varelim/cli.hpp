#pragma once

#include <iosfwd>

namespace varelim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTimeout = 2;
inline constexpr int kExitUnsat = 20;

/// Entry point of the `varelim` tool, with subcommands preprocess, solve,
/// verify and compare. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace varelim
