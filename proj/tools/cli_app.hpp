#pragma once

#include <iosfwd>

namespace wchaos::cli {

// Full command-line entry point, separated from main() so tests can drive it
// in-process. Exit codes: 0 ok, 2 usage or domain error, 3 resource cap
// exceeded, 4 input parse failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wchaos::cli
