#pragma once

#include <string>
#include <vector>

namespace hfsg {

/// Entry point shared by the hfsg binary and the test suites. `args` excludes
/// the program name. Returns the process exit code; never throws.
int run_cli(const std::vector<std::string>& args);

}  // namespace hfsg
