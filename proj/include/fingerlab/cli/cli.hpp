#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fingerlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Runs one `fingerlab` subcommand. `args` excludes the program name.
// Returns 0 on success, 1 on a data error, 2 on a usage error; a nonzero
// result always comes with a message on `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fingerlab::cli
