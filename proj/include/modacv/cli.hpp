#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modacv::cli {

/// Runs one command-line invocation (args without the program name).
/// Data goes to files or `out`; diagnostics go to `err`.  Returns 0 on
/// success (including --help), 1 on usage/validation errors, 2 on runtime
/// failures.
int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace modacv::cli
