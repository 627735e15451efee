#ifndef ENERGY_LAB_CLI_HPP_
#define ENERGY_LAB_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace energy_lab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line tool. `args` excludes the program name. Machine
/// readable CSV goes to `out`, diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace energy_lab

#endif  // ENERGY_LAB_CLI_HPP_
