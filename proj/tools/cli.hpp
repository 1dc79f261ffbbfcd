#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apm::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kNumerical = 3;

// argv-style entry point; text goes to out/err unless --out redirects it to a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace apm::cli
