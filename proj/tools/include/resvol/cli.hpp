#pragma once

#include <iosfwd>

namespace resvol {

// Exit codes: 0 success, 2 config error, 3 input error, 4 pipeline error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace resvol
