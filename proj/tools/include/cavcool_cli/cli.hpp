#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cavcool::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParam = 2;
inline constexpr int kExitFatal = 3;

/// Runs the command line; `out` receives results unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cavcool::cli
