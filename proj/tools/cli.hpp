#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace joinforge::cli {

enum ExitCode { kPass = 0, kViolation = 1, kUsage = 2 };

// Runs one invocation. `args` excludes the program name. JSON goes to `out`;
// diagnostics go to `err`, plus a short summary when `err_is_tty`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool err_is_tty = false);

}  // namespace joinforge::cli
