#pragma once

#include <string>
#include <vector>

namespace fareval {

// Full command-line driver. `args` excludes the program name. Returns the
// process exit status: 0 on success, nonzero with a diagnostic on stderr
// for any error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace fareval
