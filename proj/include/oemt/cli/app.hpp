#pragma once

#include <iosfwd>

namespace oemt::cli {

enum ExitCode { exit_ok = 0, exit_internal = 1, exit_config = 2, exit_physics = 3, exit_numerical = 4 };

/// Full command line entry point. Errors are printed to `err` as one JSON
/// object and mapped to the exit codes above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oemt::cli
