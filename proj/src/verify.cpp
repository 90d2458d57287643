#include "axishock/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace axishock {

namespace {

/// Value at x of the quadratic through (xs[k], qs[k]), k = 0..2.
double quad_eval(const double* xs, const double* qs, double x) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        double l = qs[k];
        for (int m = 0; m < 3; ++m)
            if (m != k) l *= (x - xs[m]) / (xs[k] - xs[m]);
        s += l;
    }
    return s;
}

/// Derivative at x of the quadratic through (xs[k], qs[k]).
double quad_deriv(const double* xs, const double* qs, double x) {
    const double d01 = (qs[1] - qs[0]) / (xs[1] - xs[0]);
    const double d12 = (qs[2] - qs[1]) / (xs[2] - xs[1]);
    const double c2 = (d12 - d01) / (xs[2] - xs[0]);
    return d01 + c2 * (2.0 * x - xs[0] - xs[1]);
}

/// First derivative at r = 0 of the quadratic through three nodes with
/// r0 = 0 (Newton form, exact for even data near a symmetry axis).
double axis_first_deriv(double r1, double r2, double q0, double q1, double q2) {
    const double c1 = (q1 - q0) / r1;
    const double c2 = ((q2 - q1) / (r2 - r1) - c1) / r2;
    return c1 - c2 * r1;
}

/// Second derivative at r = 0 of an odd field q, through the radial flux
/// identity q'' (0) = (2/3) d/dr [ (1/r) d/dr (r q) ] at r = 0.  Writing
/// the bracket with half-cell fluxes keeps the estimate consistent
/// (O(h^2) on odd smooth data) without the noise amplification of a
/// one-sided polynomial fit.
double axis_second_deriv(double r0, double r1, double r2, double q0, double q1,
                         double q2) {
    auto ring = [](double ra, double rb, double qa, double qb) {
        return (rb * qb - ra * qa) / (0.5 * (ra + rb) * (rb - ra));
    };
    return (2.0 / 3.0) * (ring(r1, r2, q1, q2) - ring(r0, r1, q0, q1)) /
           (0.5 * (r2 - r0));
}

/// Largest native upstream column that lies ahead of the whole front.
int upstream_column_limit(const PhysicalFields& f) {
    const double xmin = *std::min_element(f.shock_x.begin(), f.shock_x.end());
    int hi = 0;
    while (hi + 1 < static_cast<int>(f.up_x.size()) && f.up_x[hi + 1] <= xmin) ++hi;
    return hi;
}

struct BlockResiduals {
    double mx[4] = {0, 0, 0, 0}; ///< max norms: mass, mom_x, mom_r, swirl
    double l2[4] = {0, 0, 0, 0}; ///< root-mean-square norms
};

/// Residuals of the four steady axisymmetric equations on a structured
/// curvilinear block: metric and field derivatives by centred differences
/// in the index parameters, chain-ruled to physical (x, r) derivatives.
/// `margin` rings next to the block boundary are skipped so that the
/// one-sided boundary closures of the producing scheme do not dominate
/// the interior consistency measurement.
BlockResiduals block_residuals(const Field2D& X, const Field2D& R, const Field2D& ux,
                               const Field2D& ur, const Field2D& ut, const Field2D& rho,
                               const Field2D& P, const PhysicalFields& f, int margin) {
    const int n1 = X.n1() - 1, n2 = X.n2() - 1;
    BlockResiduals out;
    double ssq[4] = {0, 0, 0, 0};
    long count = 0;
    for (int i = 1 + margin; i < n1 - margin; ++i)
        for (int j = 1; j < n2 - margin; ++j) {
            const double X1 = 0.5 * (X(i + 1, j) - X(i - 1, j));
            const double R1 = 0.5 * (R(i + 1, j) - R(i - 1, j));
            const double X2 = 0.5 * (X(i, j + 1) - X(i, j - 1));
            const double R2 = 0.5 * (R(i, j + 1) - R(i, j - 1));
            const double det = X1 * R2 - R1 * X2;
            auto grad = [&](const Field2D& q, double& qx, double& qr) {
                const double q1 = 0.5 * (q(i + 1, j) - q(i - 1, j));
                const double q2 = 0.5 * (q(i, j + 1) - q(i, j - 1));
                qx = (q1 * R2 - q2 * R1) / det;
                qr = (X1 * q2 - X2 * q1) / det;
            };
            double uxx, uxr, urx, urr, utx, utr, rx, rr, Px, Pr;
            grad(ux, uxx, uxr);
            grad(ur, urx, urr);
            grad(ut, utx, utr);
            grad(rho, rx, rr);
            grad(P, Px, Pr);

            const double x = X(i, j), r = R(i, j);
            const double d = rho(i, j), a = ux(i, j), b = ur(i, j), c = ut(i, j);
            const double force_x = f.force_g(x) + f.dPhi_x(x, r);
            const double force_r = f.dPhi_r(x, r);

            const double res[4] = {
                rx * a + d * uxx + rr * b + d * urr + d * b / r,
                d * (a * uxx + b * uxr) + Px - d * force_x,
                d * (a * urx + b * urr) - d * c * c / r + Pr - d * force_r,
                d * (a * utx + b * utr) + d * b * c / r,
            };
            for (int k = 0; k < 4; ++k) {
                out.mx[k] = std::max(out.mx[k], std::abs(res[k]));
                ssq[k] += res[k] * res[k];
            }
            ++count;
        }
    for (int k = 0; k < 4; ++k)
        out.l2[k] = count ? std::sqrt(ssq[k] / static_cast<double>(count)) : 0.0;
    return out;
}

} // namespace

ShockTraces shock_traces(const PhysicalFields& f) {
    const int n2 = static_cast<int>(f.shock_x.size()) - 1;
    if (n2 < 3 || f.z1.size() < 4)
        throw std::invalid_argument("shock_traces: grid too coarse for one-sided traces");

    ShockTraces tr;
    tr.xi_prime.resize(n2 + 1);
    const auto& rs = f.shock_r;
    const auto& xs = f.shock_x;
    for (int j = 0; j <= n2; ++j) {
        const int j0 = std::clamp(j - 1, 0, n2 - 2);
        tr.xi_prime[j] = quad_deriv(&rs[j0], &xs[j0], rs[j]);
    }

    // Behind: quadratic extrapolation along each fixed-domain row from the
    // three nodes next to the front to the front node location.
    tr.behind.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        auto ex = [&](const Field2D& q) {
            const double qs[3] = {q(1, j), q(2, j), q(3, j)};
            return quad_eval(&f.z1[1], qs, f.z1[0]);
        };
        FlowState s;
        s.rho = ex(f.rho);
        s.u_x = ex(f.ux);
        s.u_r = ex(f.ur);
        s.u_theta = ex(f.ut);
        s.P = ex(f.P);
        tr.behind[j] = s;
    }

    // Ahead: for each front point, interpolate three axial stations just
    // ahead of it radially, then extrapolate the station values axially.
    const int nux = static_cast<int>(f.up_x.size()) - 1;
    const int nue = static_cast<int>(f.up_eta.size()) - 1;
    if (nux < 3 || nue < 3)
        throw std::invalid_argument("shock_traces: upstream block too coarse");
    const double he = f.up_eta[1] - f.up_eta[0];
    tr.ahead.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        const double xi = xs[j], r = rs[j];
        int ix = static_cast<int>(std::upper_bound(f.up_x.begin(), f.up_x.end(), xi) -
                                  f.up_x.begin()) -
                 1;
        ix = std::clamp(ix, 2, nux);
        auto station = [&](int is, const Field2D& q) {
            const double eta = r / f.up_wallR[is];
            int jc = std::clamp(static_cast<int>(std::lround(eta / he)), 1, nue - 1);
            const double qs[3] = {q(is, jc - 1), q(is, jc), q(is, jc + 1)};
            return quad_eval(&f.up_eta[jc - 1], qs, eta);
        };
        auto ex = [&](const Field2D& q) {
            const double qs[3] = {station(ix - 2, q), station(ix - 1, q), station(ix, q)};
            return quad_eval(&f.up_x[ix - 2], qs, xi);
        };
        FlowState s;
        s.rho = ex(f.up_rho);
        s.u_x = ex(f.up_ux);
        s.u_r = ex(f.up_ur);
        s.u_theta = ex(f.up_ut);
        s.P = ex(f.up_P);
        tr.ahead[j] = s;
    }
    return tr;
}

ResidualReport euler_residual(const PhysicalFields& f, int margin) {
    ResidualReport rep;

    const BlockResiduals down =
        block_residuals(f.X, f.R, f.ux, f.ur, f.ut, f.rho, f.P, f, margin);
    rep.euler_mass = down.mx[0];
    rep.euler_mom_x = down.mx[1];
    rep.euler_mom_r = down.mx[2];
    rep.euler_swirl = down.mx[3];
    rep.euler_mass_l2 = down.l2[0];
    rep.euler_mom_x_l2 = down.l2[1];
    rep.euler_mom_r_l2 = down.l2[2];
    rep.euler_swirl_l2 = down.l2[3];

    // Upstream block on its native wall-fitted tensor grid, restricted to
    // the region ahead of the front (the marched field continues past it
    // only to provide trace stations).
    const int nux = upstream_column_limit(f) + 1;
    const int nue = static_cast<int>(f.up_eta.size());
    Field2D Xu(nux, nue), Ru(nux, nue);
    Field2D uxu(nux, nue), uru(nux, nue), utu(nux, nue), rhou(nux, nue), Pu(nux, nue);
    for (int i = 0; i < nux; ++i)
        for (int j = 0; j < nue; ++j) {
            Xu(i, j) = f.up_x[i];
            Ru(i, j) = f.up_eta[j] * f.up_wallR[i];
            uxu(i, j) = f.up_ux(i, j);
            uru(i, j) = f.up_ur(i, j);
            utu(i, j) = f.up_ut(i, j);
            rhou(i, j) = f.up_rho(i, j);
            Pu(i, j) = f.up_P(i, j);
        }
    const BlockResiduals up = block_residuals(Xu, Ru, uxu, uru, utu, rhou, Pu, f, 0);
    rep.euler_upstream = std::max({up.mx[0], up.mx[1], up.mx[2], up.mx[3]});

    // Flow-regime margins and the largest downstream grid spacing.
    const double gm = f.gamma;
    double sub = 1e300, sup = 1e300, h = 0.0;
    const int n1 = f.X.n1() - 1, n2 = f.X.n2() - 1;
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) {
            const double c2 = gm * std::pow(f.rho(i, j), gm - 1.0);
            const double s2 = f.ux(i, j) * f.ux(i, j) + f.ur(i, j) * f.ur(i, j) +
                              f.ut(i, j) * f.ut(i, j);
            sub = std::min(sub, c2 - s2);
            if (i < n1) h = std::max(h, std::abs(f.X(i + 1, j) - f.X(i, j)));
            if (j < n2) h = std::max(h, std::abs(f.R(i, j + 1) - f.R(i, j)));
        }
    for (int i = 0; i < nux; ++i)
        for (int j = 0; j < nue; ++j) {
            const double c2 = gm * std::pow(rhou(i, j), gm - 1.0);
            const double s2 = f.up_ux(i, j) * f.up_ux(i, j) +
                              f.up_ur(i, j) * f.up_ur(i, j) +
                              f.up_ut(i, j) * f.up_ut(i, j);
            sup = std::min(sup, s2 - c2);
        }
    rep.subsonic_margin = sub;
    rep.supersonic_margin = sup;
    rep.h = h;
    return rep;
}

RhResult rh_residual(const PhysicalFields& f) {
    const ShockTraces tr = shock_traces(f);
    RhResult out;
    out.entropy_min = 1e300;
    for (size_t j = 0; j < tr.ahead.size(); ++j) {
        const FlowState& m = tr.ahead[j];
        const FlowState& p = tr.behind[j];
        const double xp = tr.xi_prime[j];
        auto jump = [&](auto q) { return q(p) - q(m); };
        const double g1 =
            jump([](const FlowState& s) { return s.rho * s.u_x; }) -
            xp * jump([](const FlowState& s) { return s.rho * s.u_r; });
        const double g2 =
            jump([](const FlowState& s) { return s.rho * s.u_x * s.u_x + s.P; }) -
            xp * jump([](const FlowState& s) { return s.rho * s.u_x * s.u_r; });
        const double g3 =
            jump([](const FlowState& s) { return s.rho * s.u_x * s.u_r; }) -
            xp * jump([](const FlowState& s) { return s.rho * s.u_r * s.u_r + s.P; });
        const double g4 =
            jump([](const FlowState& s) { return s.rho * s.u_x * s.u_theta; }) -
            xp * jump([](const FlowState& s) { return s.rho * s.u_r * s.u_theta; });
        out.rh_1 = std::max(out.rh_1, std::abs(g1));
        out.rh_2 = std::max(out.rh_2, std::abs(g2));
        out.rh_3 = std::max(out.rh_3, std::abs(g3));
        out.rh_4 = std::max(out.rh_4, std::abs(g4));
        out.entropy_min = std::min(out.entropy_min, p.P - m.P);
    }
    return out;
}

double entropy_check(const PhysicalFields& f) { return rh_residual(f).entropy_min; }

CompatibilityResult compatibility_check(const PhysicalFields& f) {
    CompatibilityResult out;
    auto scan = [&](auto radius, const Field2D& ux, const Field2D& ur, const Field2D& ut,
                    const Field2D& P, int i_hi) {
        const int n2 = ux.n2() - 1;
        if (n2 < 3) throw std::invalid_argument("compatibility_check: too few radial nodes");
        for (int i = 0; i <= i_hi; ++i) {
            const double r0 = radius(i, 0), r1 = radius(i, 1), r2 = radius(i, 2);
            out.ur = std::max(out.ur, std::abs(ur(i, 0)));
            out.ut = std::max(out.ut, std::abs(ut(i, 0)));
            out.dux = std::max(
                out.dux, std::abs(axis_first_deriv(r1, r2, ux(i, 0), ux(i, 1), ux(i, 2))));
            out.dP = std::max(
                out.dP, std::abs(axis_first_deriv(r1, r2, P(i, 0), P(i, 1), P(i, 2))));
            out.dut = std::max(
                out.dut, std::abs(axis_first_deriv(r1, r2, ut(i, 0), ut(i, 1), ut(i, 2))));
            out.d2ur = std::max(
                out.d2ur, std::abs(axis_second_deriv(r0, r1, r2, ur(i, 0), ur(i, 1),
                                                     ur(i, 2))));
        }
    };
    scan([&](int i, int j) { return f.R(i, j); }, f.ux, f.ur, f.ut, f.P, f.X.n1() - 1);
    // Ahead of the front only: the marched continuation past the front is
    // not part of the flow region being certified.
    scan([&](int i, int j) { return f.up_eta[j] * f.up_wallR[i]; }, f.up_ux, f.up_ur,
         f.up_ut, f.up_P, upstream_column_limit(f));
    return out;
}

ResidualReport verify_all(const PhysicalFields& f, int margin) {
    ResidualReport rep = euler_residual(f, margin);
    const RhResult rh = rh_residual(f);
    rep.rh_1 = rh.rh_1;
    rep.rh_2 = rh.rh_2;
    rep.rh_3 = rh.rh_3;
    rep.rh_4 = rh.rh_4;
    rep.entropy_min = rh.entropy_min;
    const CompatibilityResult co = compatibility_check(f);
    rep.compat_ur = co.ur;
    rep.compat_ut = co.ut;
    rep.compat_dux = co.dux;
    rep.compat_dP = co.dP;
    rep.compat_d2ur = co.d2ur;
    rep.compat_dut = co.dut;
    return rep;
}

std::string ResidualReport::to_json() const {
    nlohmann::ordered_json j{{"euler_mass", euler_mass},
                             {"euler_mom_x", euler_mom_x},
                             {"euler_mom_r", euler_mom_r},
                             {"euler_swirl", euler_swirl},
                             {"euler_mass_l2", euler_mass_l2},
                             {"euler_mom_x_l2", euler_mom_x_l2},
                             {"euler_mom_r_l2", euler_mom_r_l2},
                             {"euler_swirl_l2", euler_swirl_l2},
                             {"euler_upstream", euler_upstream},
                             {"rh_1", rh_1},
                             {"rh_2", rh_2},
                             {"rh_3", rh_3},
                             {"rh_4", rh_4},
                             {"entropy_min", entropy_min},
                             {"compat_ur", compat_ur},
                             {"compat_ut", compat_ut},
                             {"compat_dux", compat_dux},
                             {"compat_dP", compat_dP},
                             {"compat_d2ur", compat_d2ur},
                             {"compat_dut", compat_dut},
                             {"subsonic_margin", subsonic_margin},
                             {"supersonic_margin", supersonic_margin},
                             {"h", h}};
    return j.dump(2);
}

StructuralReport structural_claims(const std::vector<std::pair<double, double>>& pe_lb,
                                   const std::vector<double>& sigmas,
                                   const std::vector<double>& deviation_norms,
                                   const std::vector<double>& front_maxima) {
    if (pe_lb.size() < 2)
        throw std::invalid_argument("structural_claims: need at least two pressure runs");
    if (sigmas.size() < 3 || sigmas.size() != deviation_norms.size() ||
        sigmas.size() != front_maxima.size())
        throw std::invalid_argument("structural_claims: inconsistent sigma family");

    StructuralReport rep;
    rep.lb_monotone = true;
    for (size_t k = 0; k + 1 < pe_lb.size(); ++k) {
        if (!(pe_lb[k + 1].first > pe_lb[k].first) ||
            !(pe_lb[k + 1].second < pe_lb[k].second))
            rep.lb_monotone = false;
    }

    const size_t n = sigmas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < n; ++k) {
        sx += sigmas[k];
        sy += deviation_norms[k];
        sxx += sigmas[k] * sigmas[k];
        sxy += sigmas[k] * deviation_norms[k];
    }
    const double den = n * sxx - sx * sx;
    rep.sigma_slope = (n * sxy - sx * sy) / den;
    rep.sigma_intercept = (sy - rep.sigma_slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (size_t k = 0; k < n; ++k) {
        const double fit = rep.sigma_intercept + rep.sigma_slope * sigmas[k];
        ss_res += (deviation_norms[k] - fit) * (deviation_norms[k] - fit);
        ss_tot += (deviation_norms[k] - mean) * (deviation_norms[k] - mean);
    }
    rep.sigma_r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;

    for (size_t k = 0; k < n; ++k)
        if (sigmas[k] > 0.0) rep.front_constants.push_back(front_maxima[k] / sigmas[k]);
    return rep;
}

} // namespace axishock
