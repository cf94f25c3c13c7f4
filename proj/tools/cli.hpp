#pragma once

#include <iosfwd>

namespace scfault {

// Exit codes: 0 converged, 2 iteration limit or divergence, 3 setup failure,
// 1 input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scfault
