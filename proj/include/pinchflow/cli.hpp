#pragma once

#include <string>
#include <vector>

namespace pinchflow {

/// Dispatch a full command line (without argv[0]).  Returns the process exit
/// code: 0 success, 1 validation/usage error, 2 numerical failure.
int run_command(const std::vector<std::string>& args);

} // namespace pinchflow
