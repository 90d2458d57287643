#pragma once

#include <vector>

#include "axishock/background.hpp"
#include "axishock/transform.hpp"

namespace axishock {

/// Linearization coefficients sampled on the uniform z1 grid of the fixed
/// rectangle [Lb, L2] x [0, M].  Profiles are indexed like the solver grid.
struct CoefficientTable {
    std::vector<double> z1;

    // Background profiles along the subsonic branch.
    std::vector<double> ub, ubp, rho, c2, P, g, Mb2;

    // First-order system coefficients.
    std::vector<double> d1, d2, d3, d4, d5;

    // Elliptic reduction weights.
    std::vector<double> lambda0, lambda1, lambda2, lambda3;

    // Shock scalars.
    double a1 = 0.0;
    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0, b5 = 0.0;
    double kappa_b = 1.0;

    /// mu(z1) = (b3/(b2 b4)) d5(z1): weight of the nonlocal part of the
    /// axial velocity recovery.
    double mu(int i) const { return b3 / (b2 * b4) * d5[i]; }

    int n1() const { return static_cast<int>(z1.size()) - 1; }
    double h1() const { return (z1.back() - z1.front()) / n1(); }
};

/// Builds the mass geometry of the fixed rectangle from the background
/// and the mass half width (computed from the upstream inlet data).
MassGeometry make_mass_geometry(const BackgroundSolution& bg, double M);

/// Samples all coefficients of the linearized problem on an n1-cell grid.
/// Throws if the background branch is not strictly subsonic on [Lb, L2].
CoefficientTable compute_coefficients(const BackgroundSolution& bg, const MassGeometry& geom,
                                      int n1);

} // namespace axishock
