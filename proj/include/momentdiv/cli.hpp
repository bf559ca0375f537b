#pragma once

#include <iosfwd>

namespace momentdiv {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of run_cli.
enum ExitCode : int {
    kExitOk = 0,
    kExitNumeric = 1,     // bracket exhaustion, non-convergence, failed certificate
    kExitValidation = 2,  // model file unreadable or model fails its assumption checks
    kExitUsage = 64,      // unknown flag or invalid argument
};

/// Command-line entry point; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace momentdiv
