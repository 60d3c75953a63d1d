#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ionls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;  // only with --strict; also a failed validate
inline constexpr int kExitUsage = 2;

/// Full command-line entry point. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "3..9", "3,6,9" or a mix such as "3..5,9".
std::vector<long long> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace ionls::cli
