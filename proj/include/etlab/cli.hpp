#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace etlab {

// Argv-style entry point (program name excluded), testable in process.
// Reports go to out, diagnostics and skip logs to err. Exit codes: 0 all
// certified checks pass, 1 a certified check failed, 2 usage or parse
// error, 3 only sampled (non-certifying) evidence was produced.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace etlab
