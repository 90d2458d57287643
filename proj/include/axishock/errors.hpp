#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace axishock {

/// Base class for all solver-specific failures.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integration approached the sonic line |M^2 - 1| < guard where the
/// branch ODE is singular.
struct SonicDegeneracy : SolverError {
    explicit SonicDegeneracy(const std::string& msg) : SolverError(msg) {}
};

/// Requested exit pressure lies outside the admissible bracket (P1, P2).
struct AdmissibilityError : SolverError {
    double P1, P2;
    AdmissibilityError(double p1, double p2, const std::string& msg)
        : SolverError(msg), P1(p1), P2(p2) {}
};

/// The shock jump solver failed to bracket a subsonic root.
struct JumpFailure : SolverError {
    using SolverError::SolverError;
};

/// Fixed-point iteration diverged (amplitude too large).
struct DivergenceError : SolverError {
    std::vector<double> ratio_history;
    DivergenceError(std::vector<double> ratios, const std::string& msg)
        : SolverError(msg), ratio_history(std::move(ratios)) {}
};

/// Supersonic space marching lost hyperbolicity or violated its step bound.
struct MarchingFailure : SolverError {
    using SolverError::SolverError;
};

/// Coordinate transform became degenerate (non-positive flux or Jacobian).
struct TransformFailure : SolverError {
    using SolverError::SolverError;
};

} // namespace axishock
