#ifndef BOND_TOOLS_CLI_HPP
#define BOND_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace bond::cli {

/// Runs `bondc` with `args` (without the program name). Artifacts go to
/// `out`, diagnostics to `err`. Returns 0 on success, 1 on a model error and
/// 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace bond::cli

#endif  // BOND_TOOLS_CLI_HPP
