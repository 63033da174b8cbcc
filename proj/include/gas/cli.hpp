#pragma once

#include <string>
#include <vector>

namespace gas {

// Entry point behind the `gas` binary: args are argv[1..]. Returns the
// process exit code: 0 success, 1 usage error, 2 data or validation error.
int run_cli(const std::vector<std::string>& args);

}  // namespace gas
