#pragma once

#include <string>
#include <vector>

namespace psocp::app {

/// Command-line entry point. Returns the process exit code.
[[nodiscard]] int run_cli(int argc, const char* const* argv);
[[nodiscard]] int run_cli(const std::vector<std::string>& args);  // without argv[0]

}  // namespace psocp::app
