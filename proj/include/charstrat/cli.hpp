#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace charstrat {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "charstrat/1";

// Exit codes: 0 success, 1 computational failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace charstrat
