#pragma once

#include <iosfwd>

namespace ratedist {

/// Entry point of the `ratedist` tool. Exit codes: 0 success, 1 verification
/// failure, 2 usage or range error. Normal output goes to `out`, diagnostics
/// to `err` (main() passes std::cout / std::cerr).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ratedist
