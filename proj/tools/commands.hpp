#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace asg::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
};

/// Entry point shared by the `asg` binary and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace asg::cli
