#pragma once

#include <iosfwd>

namespace rhloc::cli {

/// Runs one subcommand (generate, solve, bounds, montecarlo, compare).
/// Returns 0 on success, 1 on configuration or IO errors, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rhloc::cli
