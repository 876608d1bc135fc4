#pragma once

#include <iosfwd>

namespace thermoshield {

/// Command-line entry point. Subcommands: radial, regime, sweep, solve,
/// optimize, verify {h, truncation, perturbation, regimes}.
/// Exit codes: 0 success, 1 verification failure, 2 invalid input,
/// 3 solver non-convergence.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace thermoshield
