#pragma once

#include <stdexcept>
#include <string>

namespace sislab {

/// Rejected input: bad parameter values, mismatched grids, malformed files.
/// The command-line driver maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, singular system, refused regime.
/// The command-line driver maps this to exit code 3.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sislab
