#pragma once

#include <string>
#include <vector>

namespace confaudit {

// Command-line front end entry point. args excludes the program name.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 leakage verdict
// under --fail-on-leakage.
int run_cli(const std::vector<std::string>& args);

}  // namespace confaudit
