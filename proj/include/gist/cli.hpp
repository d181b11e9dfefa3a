#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gist::cli {

// Runs the command line (args excludes the program name). Returns 0 on
// success, 2 on usage errors and 1 when stylization or I/O fails.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gist::cli
