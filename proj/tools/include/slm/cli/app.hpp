#pragma once

#include <iosfwd>

namespace slm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

/// Parses argv, runs one subcommand and writes its artifacts. Reports go to
/// `out`, artifact paths and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slm::cli
