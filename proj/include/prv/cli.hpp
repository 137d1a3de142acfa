#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prv {

/// Runs the command-line tool. args[0] is the program name. The report goes
/// to `out`, diagnostics to `err`. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prv
