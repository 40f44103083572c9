#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rpci::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs the `rpci` command line. `args` excludes the program name. Results
/// go to files or `out`; the resolved configuration and diagnostics go to
/// `err`. Returns 0 on success, 1 for invalid input or arguments, 2 for I/O
/// failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rpci::cli
