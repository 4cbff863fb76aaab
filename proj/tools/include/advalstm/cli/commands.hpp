#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "advalstm/error.hpp"

namespace advalstm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitMismatch = 4;

int exit_code(ErrorKind kind);

/// Runs one command line. `args[0]` is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace advalstm::cli
