#pragma once

// Command-line orchestration: subcommands solve, sweep, analyze, export.
// Exit codes: 0 success, 2 usage, 3 config, 4 solver failure, 5 io.

namespace ldg {

int run(int argc, const char* const* argv);

}  // namespace ldg
