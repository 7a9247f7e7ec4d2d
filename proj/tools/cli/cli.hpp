#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coherekit::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // a verify suite failed, or an internal error
inline constexpr int kExitParse = 2;       // bad arguments or unreadable input
inline constexpr int kExitValidation = 3;  // input is not a valid state / dimensions mismatch

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coherekit::cli
