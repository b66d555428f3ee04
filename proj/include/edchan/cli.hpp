#pragma once

#include <iosfwd>

namespace edchan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInputError = 2;

/// Runs one CLI invocation. argv[0] is the program name. Reports go to out
/// (or --output), diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace edchan::cli
