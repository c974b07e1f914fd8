#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace homodyne::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one `homodyne-tomo` invocation. Diagnostics go to `err` as one line; output
/// files are written to a temporary name and renamed on success, so a failed run
/// leaves no partial file behind.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homodyne::cli
