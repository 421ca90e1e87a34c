#pragma once

#include <ostream>
#include <span>
#include <string>

namespace fracsens::cli {

enum ExitCode : int { Ok = 0, InvalidInput = 1, SolverFailure = 2 };

// Subcommands: solve, sens, verify-ci, verify-freeterm, appendix, ml, convergence.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

// Text of the config schema shown by --help.
const char* schema_help();

}  // namespace fracsens::cli
