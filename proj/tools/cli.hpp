#pragma once

#include <ostream>

namespace roughsim::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2, kIoError = 3 };

/// Entry point of the roughsim command line; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roughsim::cli
