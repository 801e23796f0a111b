#pragma once

#include <iosfwd>

namespace mecgear::cli {

// Exit codes: 0 ok, 1 internal error, 2 input error, 3 convergence failure, 4 I/O error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mecgear::cli
