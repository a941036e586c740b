#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mpad::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_operational = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_hard_fail = 3;

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpad::cli
