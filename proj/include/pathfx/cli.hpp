#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pathfx {

// Dispatches one CLI invocation. Machine output (one JSON document, or DOT
// text for `diagram` without -o) goes to `out`; diagnostics go to `err`.
// Exit codes: 0 success, 1 semantic/validation error, 2 parse error,
// 3 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace pathfx
