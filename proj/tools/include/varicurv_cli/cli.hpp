#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace varicurv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFail = 2;

/// Environment variable that overrides the output directory.
inline constexpr const char* kOutputEnv = "VARICURV_OUT";

/// Entry point shared by the executable and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace varicurv::cli
