#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corpca::cli {

/// Runs one subcommand. `args` excludes the program name. Returns the exit
/// status: 0 on success, 2 on usage errors, 1 on any other failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corpca::cli
