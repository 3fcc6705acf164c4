#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bcosfire {

/// Entry point of the `bcosfire` tool. args[0] is the program name.
/// Returns 0 on success, 1 on a runtime error (one-line diagnostic on
/// `err`) and 2 on a usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcosfire
