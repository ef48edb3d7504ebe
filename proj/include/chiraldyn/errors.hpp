#pragma once

#include <stdexcept>
#include <string>

namespace chiraldyn {

// Numerical routine failed to produce a trustworthy result (ill-conditioned
// solve, non-converged iteration, NaN propagation).
struct NumericFailure : std::runtime_error {
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

// Requested steady state of a drift matrix with non-decaying eigenvalues.
struct NoSteadyState : std::runtime_error {
    explicit NoSteadyState(const std::string& what) : std::runtime_error(what) {}
};

// Measured/reconstructed inputs violate a consistency bound (e.g. implied
// covariances break Cauchy-Schwarz).
struct DataInconsistency : std::runtime_error {
    explicit DataInconsistency(const std::string& what) : std::runtime_error(what) {}
};

// Scenario file rejected: bad schema, unknown keys, out-of-range parameters.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};


// Filesystem operation failed (missing input, unwritable output directory).
struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace chiraldyn
