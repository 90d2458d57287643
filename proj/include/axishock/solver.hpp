#pragma once

#include <vector>

#include "axishock/background.hpp"
#include "axishock/coefficients.hpp"
#include "axishock/elliptic.hpp"
#include "axishock/remainders.hpp"
#include "axishock/upstream.hpp"

namespace axishock {

enum class EllipticBackend { FD, Modes };

struct SolverOptions {
    int n1 = 64;               ///< axial cells of the fixed domain
    int n2 = 64;               ///< radial cells
    double tol = 1e-10;        ///< successive-iterate composite norm tolerance
    int max_iter = 40;
    EllipticBackend backend = EllipticBackend::FD;
    int n_modes = 0;           ///< 0: one mode per radial cell
};

/// Everything the update map needs: background, upstream field, perturbation
/// and the derived geometry/coefficients on the chosen axial grid.
struct SubsonicProblem {
    const BackgroundSolution* bg = nullptr;
    const UpstreamField* up = nullptr;
    const PerturbationData* pert = nullptr;
    MassGeometry geom;
    CoefficientTable co;
};

SubsonicProblem make_subsonic_problem(const BackgroundSolution& bg, const UpstreamField& up,
                                      const PerturbationData& pert, int n1);

/// Velocity deviations recovered from the solved potential.
struct RecoveredVelocity {
    Field2D w1, w2;
};

/// Axial and radial velocity deviations from the potential: w2 is the radial
/// derivative, w1 combines the axial derivative with its nonlocal shock-trace
/// share and the tail integrals of the second-equation source.
RecoveredVelocity recover_velocity(const EllipticSolution& sol, const EllipticProblem& prob,
                                   const RemainderBundle& rb, const CoefficientTable& co);

/// Shock displacement from the axial velocity trace at the front.
ShockCurve update_shock(const std::vector<double>& w1_trace, const RemainderBundle& rb,
                        const CoefficientTable& co, const MassGeometry& geom);

/// Max-norm mismatch between the derivative of the updated front and the
/// slope relation it must satisfy at a fixed point (consistency diagnostic).
double shock_slope_mismatch(const ShockCurve& w5, const std::vector<double>& w2_trace,
                            const RemainderBundle& rb, const CoefficientTable& co);

/// Swirl transported from the front along streamtubes: r w3 constant in z1.
Field2D transport_swirl(const RemainderBundle& rb);

/// Bernoulli deviation: constant in z1, traced back to the front relation.
Field2D transport_bernoulli(const std::vector<double>& w1_trace, const RemainderBundle& rb,
                            const CoefficientTable& co);

struct ApplyReport {
    double Lambda = 0.0;            ///< corner value of the potential
    double elliptic_residual = 0.0;
    double slope_mismatch = 0.0;
};

/// One sweep of the update map: error terms of the current guess, elliptic
/// solve, velocity recovery, front update, transports.
Iterate apply_update_map(const Iterate& hat, const SubsonicProblem& pb,
                         const SolverOptions& opts, ApplyReport* report = nullptr);

struct IterationRecord {
    int iter = 0;
    double norm = 0.0;   ///< composite norm of the iterate
    double delta = 0.0;  ///< composite norm of the change
    double ratio = 0.0;  ///< delta / previous delta (0 on the first step)
    ApplyReport report;
};

struct SubsonicSolution {
    Iterate it;
    RemainderBundle rb; ///< error terms evaluated at the converged iterate
    SubsonicProblem problem;
    // Owned copies of the inputs so the solution object stays self-contained
    // (problem keeps pointers into these, not into the caller's arguments).
    BackgroundSolution bg;
    UpstreamField up;
    PerturbationData pert;
    std::vector<IterationRecord> history;
    bool converged = false;
    int iterations = 0;
    double final_delta = 0.0;
};

/// Picard iteration of the update map from the zero iterate.
/// Throws DivergenceError when the contraction ratio stays >= 1 for three
/// consecutive steps; returns converged = false when max_iter is exhausted.
SubsonicSolution solve_subsonic(const BackgroundSolution& bg, const UpstreamField& up,
                                const PerturbationData& pert, const SolverOptions& opts);

/// Physical-space fields of the perturbed flow on both sides of the shock,
/// self-contained for independent residual checks: grids, states, the shock
/// curve, the wall radius and the external force.
struct PhysicalFields {
    double gamma = 1.4;

    std::vector<double> z1, z2; ///< fixed-domain nodes (downstream block)
    Field2D X, R;               ///< physical coordinates of every node
    Field2D ux, ur, ut, rho, P; ///< downstream state at (X, R)
    std::vector<double> shock_x, shock_r; ///< shock curve samples

    std::vector<double> up_x, up_eta;       ///< native upstream tensor grid
    std::vector<double> up_wallR;           ///< wall radius at up_x
    Field2D up_ux, up_ur, up_ut, up_rho, up_P; ///< state at (up_x, eta * wallR)

    std::function<double(double)> force_g;          ///< background force g(x)
    std::function<double(double, double)> dPhi_x;   ///< sigma-scaled force
    std::function<double(double, double)> dPhi_r;   ///< perturbation gradient
};

PhysicalFields assemble_physical_solution(const SubsonicSolution& sol);

} // namespace axishock
