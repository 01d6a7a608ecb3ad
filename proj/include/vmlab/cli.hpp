#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vmlab::cli {

enum ExitCode : int { ok = 0, failed = 1, usage = 2 };

// args excludes the program name. Summaries go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vmlab::cli
