#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bubblelens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the bubble-lens command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string tool_version();

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace bubblelens
