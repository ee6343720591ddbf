#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brsim {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

/// Runs the command line `args` (without the program name). Normal output goes
/// to `out`, diagnostics to `err`. Returns the process exit code.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace brsim
