#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gred::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Runs the command line `args` (without the program name). Regular output
/// goes to `out`, diagnostics to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gred::cli
