#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cavsq
{

inline constexpr char const* kToolVersion = "1.0.0";

/// Exit codes: 0 success, 1 usage or config error, 2 oracle validation failure.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace cavsq
