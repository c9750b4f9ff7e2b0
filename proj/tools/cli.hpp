#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hgtpp::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kDivergence = 4 };

/// Runs one `hgtpp` command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hgtpp::cli
