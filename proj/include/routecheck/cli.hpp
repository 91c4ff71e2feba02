#pragma once

#include <iosfwd>

namespace routecheck {

// Full command-line surface (route, analyze, suite, validate, gen-network).
// Returns the process exit code; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace routecheck
