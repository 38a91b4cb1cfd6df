#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace larn::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_numeric = 1;
inline constexpr int exit_io = 2;

/// Entry point shared by the `larn` executable and the in-process tests.
/// Data goes to files or `out`; diagnostics and progress go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace larn::cli
