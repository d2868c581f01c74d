#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace finelens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `finelens` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on a validation error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finelens
