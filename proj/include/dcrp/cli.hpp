#pragma once

#include <string>
#include <vector>

namespace dcrp {

/// Exit codes: 0 success, 1 usage or input error, 2 statistical check failed,
/// 3 infeasible configuration.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

} // namespace dcrp
