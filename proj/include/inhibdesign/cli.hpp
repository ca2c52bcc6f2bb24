#pragma once

#include <iosfwd>

namespace inhibdesign {

enum ExitCode : int { kExitOk = 0, kExitCertificateFail = 1, kExitInputError = 2 };

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace inhibdesign
