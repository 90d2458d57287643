#pragma once

#include <vector>

#include "axishock/background.hpp"
#include "axishock/coefficients.hpp"
#include "axishock/grid.hpp"
#include "axishock/transform.hpp"
#include "axishock/upstream.hpp"

namespace axishock {

/// One iterate of the downstream solve: deviation fields on the fixed
/// rectangle plus the shock displacement curve.
struct Iterate {
    Field2D w1; ///< axial velocity deviation (even across the axis)
    Field2D w2; ///< radial velocity (odd)
    Field2D w3; ///< swirl velocity (odd)
    Field2D w4; ///< Bernoulli deviation (even)
    ShockCurve w5;

    static Iterate zero(int n1_cells, int n2_cells, double M);
    /// Composite max norm: fields, displacement and its slope.
    double norm() const;
};

/// Upstream state sampled at the perturbed shock, one entry per z2 node.
struct ShockTrace {
    std::vector<double> r;   ///< physical radius of the trace point
    std::vector<double> ux, ur, ut, P, rho;
};

/// All nonlinear error terms of one linearization step, evaluated at a
/// given iterate.
struct RemainderBundle {
    // Fields on the fixed rectangle.
    Field2D F3, F4;     ///< interior quadratic terms of the first-order system
    Field2D G1, G2;     ///< right-hand sides after absorbing the jump data
    Field2D G2_tail;    ///< G2_tail(i,j) = int_{z2_j}^{M} G2(z1_i, s) ds
    Field2D rhat;       ///< physical radius of the iterate
    Field2D rho_hat;    ///< downstream density of the iterate

    // Profiles in z2 (size n2+1).
    std::vector<double> R1, R2, R3, R4; ///< shock jump error terms
    std::vector<double> h1;  ///< shock slope error
    std::vector<double> h2;  ///< Robin data error: b2 h1 + d/dz2 R1
    std::vector<double> h3;  ///< exit condition error
    std::vector<double> I0;  ///< I0(z2) = int_{z2}^{M} G2(Lb, s) ds
    std::vector<double> q2t; ///< integrated Robin boundary data
    std::vector<double> q3t; ///< exit Neumann data for the potential

    // Profile in z1 (size n1+1).
    std::vector<double> h4;  ///< wall data: sigma f'(D0) (u_b(D0) + w1)

    ShockTrace trace;
};

/// Evaluates every nonlinear remainder of the scheme at the iterate
/// `hat`, sampling the supersonic flow `up` along the displaced shock.
RemainderBundle nonlinear_remainders(const Iterate& hat, const UpstreamField& up,
                                     const BackgroundSolution& bg,
                                     const CoefficientTable& co, const MassGeometry& geom,
                                     const PerturbationData& pert);

} // namespace axishock
