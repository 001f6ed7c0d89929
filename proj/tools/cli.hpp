#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gossip_age::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kRuntime = 3,
  kVerificationFailed = 4,
};

/// Runs the gossip-age command line. `args` excludes the program name.
/// Results go to --out (or `out` when absent); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gossip_age::cli
