#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scalarcf {

/// Exit codes: 0 success, 1 acceptance or convergence failure, 2 bad
/// configuration or usage.
int cli_main(int argc, char** argv);
/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scalarcf
