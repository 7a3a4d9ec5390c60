#pragma once

#include <iosfwd>

namespace qsat2 {

// Exit codes: 0 success, 2 usage error, 3 instance parse error, 4 component
// above the qubit cap (count only), 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qsat2
