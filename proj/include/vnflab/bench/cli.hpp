#pragma once

#include <iostream>

namespace vnflab::bench {

/// Entry point of the command-line tool: train, eval, compare,
/// validate-config and export-defaults. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace vnflab::bench
