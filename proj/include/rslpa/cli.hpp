#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rslpa {

// Runs the command-line interface on `args` (without the program name).
// Results go to `out` as key=value lines, diagnostics to `err`.
// Returns 0 on success, 1 on runtime failure, 2 on bad usage or input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rslpa
