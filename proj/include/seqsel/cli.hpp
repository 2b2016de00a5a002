#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqsel {

// Runs the seqsel command line; args exclude the program name.
// Exit codes: 0 ok, 1 runtime failure, 2 usage error or invalid problem.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqsel
