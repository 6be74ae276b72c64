#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace arsum {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on a domain error (reported as "Kind: message" on `err`) and 2
/// on a usage error.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arsum
