#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dermveil::app {

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Failures print one line "error: <kind>: <message>" to
/// `err` and return nonzero (2 for usage errors, 1 otherwise).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dermveil::app
