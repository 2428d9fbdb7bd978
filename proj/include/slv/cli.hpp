#ifndef SLV_CLI_HPP
#define SLV_CLI_HPP

#include <string>
#include <vector>

namespace slv {

// Exit codes: 0 success, 2 config error, 3 numeric budget error,
// 4 failed --check gate.
int run_cli(const std::vector<std::string>& args);

}  // namespace slv

#endif
