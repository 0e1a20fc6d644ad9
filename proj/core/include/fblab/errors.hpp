#pragma once

#include <stdexcept>
#include <string>

namespace fblab {

/// Nonlinear or linear iteration did not reach its tolerance.
struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double last_residual, int iterations)
        : std::runtime_error(what), residual(last_residual), iters(iterations) {}
    double residual = 0.0;
    int iters = 0;
};

/// Chart construction detected crossing or coinciding orbits.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Orbit never reaches the requested x2 level.
struct NoCrossingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// ODE step size underflowed (pathological field evaluator).
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grid too coarse to resolve the requested region.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration file problem, with the offending line when known.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, int line_no = 0)
        : std::runtime_error(line_no > 0 ? what + " (line " + std::to_string(line_no) + ")" : what),
          line(line_no) {}
    int line = 0;
};

} // namespace fblab
