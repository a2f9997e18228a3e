#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsos::cli {

inline constexpr int kExitCertified = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoCert = 2;

/// Runs the command line (args exclude the program name). Results go to
/// `out`, diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsos::cli
