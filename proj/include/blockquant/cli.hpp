#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blockquant::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDomainError = 3;

/// Runs the command line front end. `args` excludes the program name.
/// Results go to `out`; progress and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blockquant::cli
