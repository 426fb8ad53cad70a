#pragma once

#include <string>
#include <vector>

namespace raceway {

/// Entry point of the `raceway` command line tool. `args` excludes the program name.
///
/// Returns 0 on success, 1 on a runtime failure and 2 on a usage error.
int run_command(const std::vector<std::string>& args);

}  // namespace raceway
