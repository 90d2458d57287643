#pragma once

#include <vector>

#include "axishock/coefficients.hpp"
#include "axishock/grid.hpp"
#include "axishock/remainders.hpp"

namespace axishock {

/// Discrete data of the second order nonlocal problem for the potential:
///   d/dz1 (lambda1 d/dz1 phi) + lambda2 (d2/dz2^2 + (1/z2) d/dz2) phi
///     - lambda3 b5 phi(Lb, z2)  =  rhs0 + d/dz1 Gflux
/// with a Robin condition at z1 = Lb, Neumann data at z1 = L2 and at the
/// wall, and axial symmetry at z2 = 0.
struct EllipticProblem {
    std::vector<double> z1; ///< n1+1 axial nodes on [Lb, L2]
    double M = 1.0;         ///< radial half width
    std::vector<double> lambda1, lambda2, lambda3;
    double b5 = 0.0;

    Field2D rhs0;  ///< zeroth-order right-hand side
    Field2D Gflux; ///< field differentiated inside the axial flux

    std::vector<double> q2t; ///< Robin data: d1phi - b5 phi = q2t at Lb
    std::vector<double> q3t; ///< Neumann data at L2
    std::vector<double> h4;  ///< wall data: d2phi(z1, M) = h4

    int n1() const { return static_cast<int>(z1.size()) - 1; }
    int n2() const { return rhs0.n2() - 1; }
    double h1() const { return (z1.back() - z1.front()) / n1(); }
    double h2() const { return M / n2(); }
};

struct EllipticSolution {
    Field2D phi_star;     ///< potential before gauge shift
    double Lambda = 0.0;  ///< phi_star at the shock-wall corner
    double residual = 0.0;
};

/// Assembles the potential problem from the remainder bundle.
EllipticProblem build_elliptic_problem(const RemainderBundle& rb, const CoefficientTable& co,
                                       const MassGeometry& geom);

/// Direct sparse finite-difference solve (flux form, half-cell boundary
/// rows, nonlocal column at z1 = Lb).
EllipticSolution solve_elliptic_fd(const EllipticProblem& p);

/// Bessel-mode expansion in z2 (eigenfunctions J0(alpha_k z2 / M) with
/// J1(alpha_k) = 0), one nonlocal two-point problem per mode.
/// nmodes = 0 uses one mode per radial grid cell.
EllipticSolution solve_elliptic_modes(const EllipticProblem& p, int nmodes = 0);

/// Max-norm residual of a candidate potential in the finite-difference
/// discretization of the problem (interior rows only).
double elliptic_fd_residual(const EllipticProblem& p, const Field2D& phi);

/// First n positive roots of the Bessel function J1.
std::vector<double> bessel_j1_roots(int n);

} // namespace axishock
