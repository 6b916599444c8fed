#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corpusforge {

// Entry point of the corpusforge tool. `args[0]` is the program name.
// Returns 0 on success, 1 on usage or contract errors, 2 on I/O errors and
// 3 on malformed input data.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corpusforge
