#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace otlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitCertificateFailed = 2;

/// Runs one command line (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otlab
