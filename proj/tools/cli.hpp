#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flashsim::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitViolations = 1,  ///< constraint errors, or warnings under --strict
    kExitInputError = 2,  ///< usage, I/O, config, trace and model errors
};

/// Whole command-line driver; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flashsim::cli
