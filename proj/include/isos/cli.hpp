#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isos::cli {

inline constexpr int kExitEquivalent = 0;
inline constexpr int kExitDistinguished = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitParse = 65;
inline constexpr int kExitEngine = 70;

// `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isos::cli
