#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bloch::cli {

inline constexpr const char* kSchema = "blochprop/1";

enum ExitCode {
  kOk = 0,
  kUsage = 2,
  kDomain = 3,
  kVerifyFailed = 4,
};

/// Parses and runs one CLI invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bloch::cli
