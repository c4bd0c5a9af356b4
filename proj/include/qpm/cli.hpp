#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpm {

inline constexpr const char* kVersion = "0.1.0";

// Runs one CLI invocation (args exclude the program name). Returns the
// process exit code: 0 success, 1 usage error, 2 numerical breakdown.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpm
