// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skipfree {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,        // bad flags, unreadable or malformed spec, incompatible method
    kExitDiverged = 2,     // some requested value diverged
    kExitUnsettled = 3,    // index cap reached or oscillation
    kExitFailure = 4,      // numerical failure such as a singular truncation
};

/// Runs the CLI on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace skipfree
