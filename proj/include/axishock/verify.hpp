#pragma once

#include <string>
#include <utility>
#include <vector>

#include "axishock/solver.hpp"

namespace axishock {

/// Residual norms of an independent audit of a computed flow.  All checks
/// read only the sampled PhysicalFields, never solver internals.
struct ResidualReport {
    // Steady axisymmetric system behind the shock, centred differences on
    // the curvilinear grid, interior nodes: max and root-mean-square norms.
    double euler_mass = 0.0, euler_mom_x = 0.0, euler_mom_r = 0.0, euler_swirl = 0.0;
    double euler_mass_l2 = 0.0, euler_mom_x_l2 = 0.0;
    double euler_mom_r_l2 = 0.0, euler_swirl_l2 = 0.0;
    // Same four equations ahead of the shock (max over equations and nodes).
    double euler_upstream = 0.0;
    // Jump conditions across the shock curve, max over the front.
    double rh_1 = 0.0, rh_2 = 0.0, rh_3 = 0.0, rh_4 = 0.0;
    // Minimum pressure jump (behind minus ahead) along the front.
    double entropy_min = 0.0;
    // Axis regularity, max over both sides: values of u_r and u_theta,
    // radial derivatives of u_x, P and u_theta, second derivative of u_r.
    double compat_ur = 0.0, compat_ut = 0.0, compat_dux = 0.0;
    double compat_dP = 0.0, compat_d2ur = 0.0, compat_dut = 0.0;
    // Pointwise flow-regime margins: min of c^2 - |u|^2 behind the shock
    // and min of |u|^2 - c^2 ahead of it.
    double subsonic_margin = 0.0, supersonic_margin = 0.0;
    double h = 0.0; ///< largest physical grid spacing of the downstream block

    std::string to_json() const;
};

/// One-sided states at the shock curve, extrapolated quadratically from
/// three nodes per side, and the slope of the front.
struct ShockTraces {
    std::vector<double> xi_prime;        ///< d(shock_x)/d(shock_r)
    std::vector<FlowState> ahead, behind;
};

ShockTraces shock_traces(const PhysicalFields& f);

/// Residuals of the four steady axisymmetric equations (mass, axial and
/// radial momentum with the external force, swirl) on both blocks; also
/// fills the regime margins and the grid parameter h.  `margin` rings
/// next to each block boundary are excluded from the audit; refinement
/// comparisons should scale it so both grids are audited over the same
/// physical region (the residual grows toward the outflow edge like
/// h^2 / distance, so auditing closer to the edge on the finer grid
/// understates the convergence rate).
ResidualReport euler_residual(const PhysicalFields& f, int margin = 1);

/// Jump-condition residuals (mass, axial momentum, radial momentum, swirl)
/// across the computed front, max over the front, plus the entropy margin.
struct RhResult {
    double rh_1 = 0.0, rh_2 = 0.0, rh_3 = 0.0, rh_4 = 0.0;
    double entropy_min = 0.0;
};

RhResult rh_residual(const PhysicalFields& f);

/// Minimum of P(behind) - P(ahead) along the front; positive certifies
/// that the front compresses.
double entropy_check(const PhysicalFields& f);

/// Axis regularity residuals on both sides.
struct CompatibilityResult {
    double ur = 0.0, ut = 0.0, dux = 0.0, dP = 0.0, d2ur = 0.0, dut = 0.0;
};

CompatibilityResult compatibility_check(const PhysicalFields& f);

/// All checks combined into one report.
ResidualReport verify_all(const PhysicalFields& f, int margin = 1);

/// Aggregate claims over a family of completed runs.
struct StructuralReport {
    bool lb_monotone = false;  ///< shock foot strictly decreasing in exit pressure
    double sigma_slope = 0.0;  ///< least-squares slope of deviation norm vs sigma
    double sigma_intercept = 0.0;
    double sigma_r2 = 0.0;     ///< linear-fit coefficient of determination
    std::vector<double> front_constants; ///< max|shock_x - Lb| / sigma per run
};

/// pe_lb: (exit pressure, shock position) pairs sorted by pressure;
/// sigmas / deviation_norms / front_maxima: matched per-run family
/// including a sigma = 0 anchor.  Throws std::invalid_argument when the
/// family is too small or inconsistently sized.
StructuralReport structural_claims(const std::vector<std::pair<double, double>>& pe_lb,
                                   const std::vector<double>& sigmas,
                                   const std::vector<double>& deviation_norms,
                                   const std::vector<double>& front_maxima);

} // namespace axishock
