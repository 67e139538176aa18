// Command-line front end: curve, eigen, ratio and simulate.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wiener::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command. args excludes the program name. Results go to out when
/// no --out path is given; diagnostics go to err.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Shortest decimal that round-trips, independent of locale.
std::string format_double(double value);

} // namespace wiener::cli
