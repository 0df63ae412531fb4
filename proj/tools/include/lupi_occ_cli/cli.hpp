#pragma once

// The lupi_occ command line, callable in-process for testing.

#include <iosfwd>
#include <string>
#include <vector>

namespace lupi_occ::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFormat = 3;
inline constexpr int kExitNumerical = 4;

// args excludes the program name. Errors are reported on err as a single
// line "error: code=<kind> exit=<n> message=<text>".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lupi_occ::cli
