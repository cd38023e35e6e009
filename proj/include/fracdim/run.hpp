#pragma once

#include <iosfwd>

#include "fracdim/config.hpp"

namespace fracdim {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitValidation = 2, kExitNonConvergence = 3 };

// Validates and executes one command. JSON goes to config.out (stdout when absent), CSV
// ladders to config.csv; progress and errors go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace fracdim
