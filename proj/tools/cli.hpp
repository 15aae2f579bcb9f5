#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqlat::cli {

/// Exit status contract shared by every subcommand.
enum ExitCode : int { kOk = 0, kInternal = 1, kInvalidInput = 2 };

/// Runs one `seqlat` invocation in-process. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqlat::cli
