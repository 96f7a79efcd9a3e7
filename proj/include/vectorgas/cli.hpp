#pragma once

namespace vectorgas {

inline constexpr const char* kVersion = "0.2.0";

// Entry point behind main(). Exit codes: 0 success, 1 usage error,
// 2 domain/validation error, 3 numeric non-convergence.
int run_command(int argc, const char* const* argv);

}  // namespace vectorgas
