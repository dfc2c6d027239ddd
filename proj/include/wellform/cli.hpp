// Command-line front end. run_cli takes the argument vector minus the
// program name and writes to the given streams, which keeps the whole CLI
// unit-testable. Exit codes: 0 clean, 1 findings, 2 parse error in an
// input file, 3 usage error.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wellform {

inline constexpr const char* kToolVersion = "0.1.0";

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace wellform
