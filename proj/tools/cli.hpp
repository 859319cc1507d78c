#ifndef SEMFUNC_TOOLS_CLI_HPP
#define SEMFUNC_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace semfunc {

// Command-line driver; args exclude the program name. Reports go to out,
// diagnostics (including timings) to err, so out is byte-reproducible for
// a given invocation. Returns the process exit code: 0 success, 1 bad
// input or unanswerable query, 2 internal failure.
int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err);

}  // namespace semfunc

#endif
