#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elevator::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kType = 1;
inline constexpr int kParse = 2;
inline constexpr int kConfig = 3;
inline constexpr int kFuel = 4;
inline constexpr int kProperty = 5;
}  // namespace exit_code

// `args` excludes the program name. `prompt` enables the REPL prompt.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            bool prompt = false);

}  // namespace elevator::cli
