#pragma once

#include <iosfwd>

namespace rdm::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kIo = 3 };

/// Entry point of the rdm tool; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rdm::cli
