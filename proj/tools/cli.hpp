#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hisom {

// Exit codes: 0 pass, 1 verification failure, 2 precondition or schema error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hisom
