#pragma once

namespace gasdiff::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kInput = 3, kInstability = 4 };

/// Parses argv, runs one subcommand and maps errors to exit codes. Never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace gasdiff::cli
