#pragma once

#include <ostream>

namespace jm::cli {

/// Runs the `jm` command line. Exit codes: 0 success, 1 malformed input,
/// 2 engine failure, 3 I/O failure; argument errors use CLI11's codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jm::cli
