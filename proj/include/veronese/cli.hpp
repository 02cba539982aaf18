#pragma once

#include <ostream>

namespace veronese::cli {

// Exit codes.
inline constexpr int kExact = 0;
inline constexpr int kFailure = 1;    // invariant violation or invalid input
inline constexpr int kBoundOnly = 2;  // budget stopped the search before a verdict

// Entry point of the `veronese` tool. Reports go to `out` (or --output),
// progress and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace veronese::cli
