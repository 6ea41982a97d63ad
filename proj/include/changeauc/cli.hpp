#pragma once

#include <string>
#include <vector>

namespace changeauc {

// Command-line front end; args are argv[1..] in order. Returns the process
// exit code: 0 success, 1 usage error, 2 data/runtime error. Exposed as a
// library call so tests can drive full commands in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace changeauc
