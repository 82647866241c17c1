#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flow {

/// Command-line front end. Exit codes:
///   0  check passed / result defined
///   1  a check failed (flow equation, extension, EA, gamma, phi, laws)
///   2  result undefined (composition) or solver gave no solution
///   3  malformed input or usage error
///   4  resource bound exceeded
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct CliResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

/// Capture variant for tests.
CliResult cli_run(const std::vector<std::string>& args);

int cli_main(int argc, const char* const* argv);

} // namespace flow
