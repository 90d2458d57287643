#include "axishock/remainders.hpp"

#include <cmath>
#include <stdexcept>

#include "axishock/errors.hpp"

namespace axishock {

Iterate Iterate::zero(int n1_cells, int n2_cells, double M) {
    Iterate it;
    it.w1 = Field2D(n1_cells + 1, n2_cells + 1, 0.0);
    it.w2 = it.w1;
    it.w3 = it.w1;
    it.w4 = it.w1;
    it.w5.M = M;
    it.w5.Lambda = 0.0;
    it.w5.w5.assign(n2_cells + 1, 0.0);
    return it;
}

double Iterate::norm() const {
    double n = w1.max_abs() + w2.max_abs() + w3.max_abs() + w4.max_abs() + w5.max_abs();
    double dmax = 0.0;
    for (double d : w5.w5_prime()) dmax = std::max(dmax, std::abs(d));
    return n + dmax;
}

namespace {

/// First derivative in z1 of every column: centred interior, one-sided ends.
Field2D dz1_field(const Field2D& f, double h) {
    const int n1 = f.n1(), n2 = f.n2();
    Field2D d(n1, n2);
    std::vector<double> col(n1);
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) col[i] = f(i, j);
        auto dc = ddx(col, h);
        for (int i = 0; i < n1; ++i) d(i, j) = dc[i];
    }
    return d;
}

/// First derivative in z2 of every row with axis parity at j = 0.
Field2D dz2_field(const Field2D& f, double h, AxisParity p) {
    const int n1 = f.n1(), n2 = f.n2();
    Field2D d(n1, n2);
    std::vector<double> row(n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) row[j] = f(i, j);
        auto dr = ddx_axis(row, h, p);
        for (int j = 0; j < n2; ++j) d(i, j) = dr[j];
    }
    return d;
}

/// Tail integrals T(j) = int_{z2_j}^{M} f ds by trapezoid.
std::vector<double> tail_integral(const std::vector<double>& f, double h) {
    auto cum = cumtrapz(f, h);
    const double total = cum.back();
    for (auto& c : cum) c = total - c;
    return cum;
}

} // namespace

RemainderBundle nonlinear_remainders(const Iterate& hat, const UpstreamField& up,
                                     const BackgroundSolution& bg,
                                     const CoefficientTable& co, const MassGeometry& geom,
                                     const PerturbationData& pert) {
    const int n1 = hat.w1.n1() - 1, n2 = hat.w1.n2() - 1;
    if (co.n1() != n1)
        throw std::invalid_argument("nonlinear_remainders: coefficient grid mismatch");
    const double gamma = bg.gas.gamma();
    const double sigma = pert.sigma;
    const double h1g = co.h1();
    const double h2g = geom.h2(n2);
    const double Kb = co.d2[0]; // 1/kappa_b, constant
    const double Bb = bg.B_plus();

    DomainMap map(hat.w5, geom.Lb, geom.L2);
    std::vector<double> z2(n2 + 1);
    for (int j = 0; j <= n2; ++j) z2[j] = h2g * j;

    RemainderBundle out;
    out.rhat = Field2D(n1 + 1, n2 + 1);
    out.rho_hat = Field2D(n1 + 1, n2 + 1);

    // --- Density and physical radius of the iterate (weakly coupled through
    // the force perturbation; a short fixed point resolves them together).
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) out.rhat(i, j) = geom.kappa_b * z2[j];
    std::vector<double> flux(n2 + 1);
    for (int pass = 0; pass < 4; ++pass) {
        for (int i = 0; i <= n1; ++i) {
            for (int j = 0; j <= n2; ++j) {
                const double x = map.D0(co.z1[i], j);
                const double ub = bg.sub(x).u;
                const double uhx = ub + hat.w1(i, j);
                const double sp2 = uhx * uhx + hat.w2(i, j) * hat.w2(i, j) +
                                   hat.w3(i, j) * hat.w3(i, j);
                const double Phi =
                    bg.Phi_b(x) + sigma * pert.Phi_e(x, out.rhat(i, j));
                out.rho_hat(i, j) =
                    density_from_bernoulli(bg.gas, Bb + hat.w4(i, j), Phi, sp2);
                flux[j] = out.rho_hat(i, j) * uhx;
                if (!(flux[j] > 0.0))
                    throw TransformFailure("nonlinear_remainders: flow reversal");
            }
            auto r = radius_from_mass(flux, h2g);
            for (int j = 0; j <= n2; ++j) out.rhat(i, j) = r[j];
        }
    }

    // --- Upstream trace along the displaced shock.
    out.trace.r.resize(n2 + 1);
    out.trace.ux.resize(n2 + 1);
    out.trace.ur.resize(n2 + 1);
    out.trace.ut.resize(n2 + 1);
    out.trace.P.resize(n2 + 1);
    out.trace.rho.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        const double psi = geom.Lb + hat.w5.w5[j];
        const double rm = up.radius_from_mass(psi, z2[j]);
        const FlowState s = up.eval_cubic(psi, rm);
        out.trace.r[j] = rm;
        out.trace.ux[j] = s.u_x;
        out.trace.ur[j] = s.u_r;
        out.trace.ut[j] = s.u_theta;
        out.trace.P[j] = s.P;
        out.trace.rho[j] = s.rho;
    }

    // --- Jump error terms R1..R4 and the slope error h1.
    const State1D plus = bg.plus_at_shock;
    const double c2p = bg.gas.sound_speed_sq(plus.rho);
    const double gLb = bg.force.g(bg.Lb);
    const double m = bg.mass_flux;
    const double drho_b = plus.rho - bg.minus_at_shock.rho;
    out.R1.resize(n2 + 1);
    out.R2.resize(n2 + 1);
    out.R3.resize(n2 + 1);
    out.R4.resize(n2 + 1);
    out.h1.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        const double w5j = hat.w5.w5[j];
        const double psi = geom.Lb + w5j;
        const State1D sbp = bg.sub(psi);   // downstream background at psi
        const State1D sbm = bg.sup(psi);   // upstream background at psi
        const double w1j = hat.w1(0, j), w2j = hat.w2(0, j), w3j = hat.w3(0, j);
        const double uhx = sbp.u + w1j;
        const double rhoh = out.rho_hat(0, j);
        const double Ph = bg.gas.pressure(rhoh);
        const double rho_dot = rhoh - sbp.rho;

        const double jur = w2j - out.trace.ur[j];
        const double jP = Ph - out.trace.P[j];
        const double mflux_minus = out.trace.rho[j] * out.trace.ux[j];

        // Exact slope elimination: the radial momentum bracket gives
        // psi' = j [u_r] / [P] with the normal mass flux
        // j = rho^- (u_x^- - psi' u_r^-), solved for psi'.
        const double psip =
            mflux_minus * jur /
            (jP + out.trace.rho[j] * out.trace.ur[j] * jur);
        const double rhs_a = psip * (rhoh * w2j - out.trace.rho[j] * out.trace.ur[j]);
        const double mompq = rhoh * uhx * uhx + Ph;
        const double rhs_b = psip * (rhoh * uhx * w2j - mflux_minus * out.trace.ur[j]);

        const double R11 = rhs_a + (mflux_minus - m) -
                           (sbp.rho - plus.rho) * w1j - (uhx - plus.u) * rho_dot;
        const double momjump_psi =
            (sbp.rho * sbp.u * sbp.u + sbp.P) - (sbm.rho * sbm.u * sbm.u + sbm.P);
        const double R12 =
            -(momjump_psi - drho_b * gLb * w5j) +
            (mflux_minus * out.trace.ux[j] + out.trace.P[j]) -
            (sbm.rho * sbm.u * sbm.u + sbm.P) -
            (mompq - (sbp.rho * sbp.u * sbp.u + sbp.P) - 2.0 * m * w1j -
             (plus.u * plus.u + c2p) * rho_dot) +
            rhs_b;
        const double den = c2p - plus.u * plus.u;
        out.R1[j] = (-2.0 * plus.u * R11 + R12) / den;
        out.R2[j] = ((plus.u * plus.u + c2p) * R11 - plus.u * R12) / (plus.rho * den);
        const double R13 =
            (sbp.u - plus.u) * w1j - (c2p / plus.rho) * rho_dot +
            0.5 * (w1j * w1j + w2j * w2j + w3j * w3j) +
            gamma / (gamma - 1.0) *
                (std::pow(rhoh, gamma - 1.0) - std::pow(sbp.rho, gamma - 1.0)) -
            sigma * pert.Phi_e(psi, out.rhat(0, j));
        out.R3[j] = (-plus.u * R11 + R12) / plus.rho + R13;
        // Eliminating the front height between the Bernoulli and the axial
        // velocity trace relations pairs R3 with the R2 remainder.
        out.R4[j] = out.R3[j] - co.b3 / co.b2 * out.R2[j];

        // Slope error h1 with the axis limit 2 z2 / r -> (2 rho u_x)^(1/2).
        const double two_z2_over_r =
            (j == 0) ? std::sqrt(2.0 * rhoh * uhx) : 2.0 * z2[j] / out.rhat(0, j);
        out.h1[j] = w2j * (two_z2_over_r / jP - co.a1) -
                    two_z2_over_r * out.trace.ur[j] / jP;
    }
    auto dR2 = ddx_axis(out.R2, h2g, AxisParity::Even);
    auto dR4 = ddx_axis(out.R4, h2g, AxisParity::Even);
    out.h2.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) out.h2[j] = co.b2 * out.h1[j] + dR2[j];

    // --- Interior quadratic terms F3, F4 and the reduced sources G1, G2.
    Field2D d1w1 = dz1_field(hat.w1, h1g), d1w2 = dz1_field(hat.w2, h1g);
    Field2D d1w3 = dz1_field(hat.w3, h1g), d1w4 = dz1_field(hat.w4, h1g);
    Field2D d2w1 = dz2_field(hat.w1, h2g, AxisParity::Even);
    Field2D d2w2 = dz2_field(hat.w2, h2g, AxisParity::Odd);
    Field2D d2w3 = dz2_field(hat.w3, h2g, AxisParity::Odd);
    Field2D d2w4 = dz2_field(hat.w4, h2g, AxisParity::Even);

    out.F3 = Field2D(n1 + 1, n2 + 1);
    out.F4 = Field2D(n1 + 1, n2 + 1);
    out.G1 = Field2D(n1 + 1, n2 + 1);
    out.G2 = Field2D(n1 + 1, n2 + 1);
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            const double x = map.D0(co.z1[i], j);
            const State1D sb = bg.sub(x);
            const double ub = sb.u;
            const double ubp = bg.sub_u_prime(x);
            const double c2b = bg.gas.sound_speed_sq(sb.rho);
            const double M2 = ub * ub / c2b;

            const double w1v = hat.w1(i, j), w2v = hat.w2(i, j);
            const double w3v = hat.w3(i, j), w4v = hat.w4(i, j);
            const double uhx = ub + w1v;
            const double rhoh = out.rho_hat(i, j);
            const double c2t = bg.gas.sound_speed_sq(rhoh);
            const double rh = out.rhat(i, j);

            const double D1f = map.D1_factor(j);
            const double shift = map.D2_shift(co.z1[i], j);
            const double D1w1 = D1f * d1w1(i, j), D1w2 = D1f * d1w2(i, j);
            const double D2w1 = d2w1(i, j) + shift * d1w1(i, j);
            const double D2w2 = d2w2(i, j) + shift * d1w2(i, j);
            const double D2w3 = d2w3(i, j) + shift * d1w3(i, j);
            const double D2w4 = d2w4(i, j) + shift * d1w4(i, j);

            // Streamfunction weights r rho u / (2 z2) with axis limits.
            const double Krho = (j == 0) ? std::sqrt(rhoh * uhx / 2.0)
                                         : rh * rhoh * uhx / (2.0 * z2[j]);
            const double Krho_w2 = (j == 0) ? 0.0 : rh * rhoh * w2v / (2.0 * z2[j]);
            // Axis limit of w2/r: dz2 w2 divided by dr/dz2 = (2/(rho u))^(1/2).
            const double w2_over_rhat =
                (j == 0) ? d2w2(i, 0) * std::sqrt(rhoh * uhx / 2.0) : w2v / rh;
            const double w2_over_rb =
                (j == 0) ? d2w2(i, 0) * Kb : w2v / (geom.kappa_b * z2[j]);
            const double w3sq_over_rhat = (j == 0) ? 0.0 : w3v * w3v / rh;

            const double Phie = pert.Phi_e(x, rh);
            const double D1Phie =
                pert.dPhi_e_dx(x, rh) + pert.dPhi_e_dr(x, rh) * (w2v / uhx);

            const double F1 =
                (1.0 / c2b) *
                (-(c2t - uhx * uhx - c2b + ub * ub) * D1w1 +
                 (0.5 * (gamma + 1.0) * w1v * w1v +
                  0.5 * (gamma - 1.0) * (w2v * w2v + w3v * w3v)) *
                     ubp -
                 (gamma - 1.0) * ubp * sigma * Phie +
                 (c2t - uhx * uhx) * Krho_w2 * D2w1 - c2t * Krho * D2w2 +
                 c2b * Kb * D2w2 + w2v * w2v * Krho * D2w2 -
                 c2t * w2_over_rhat + c2b * w2_over_rb -
                 w3v * w3v * w2_over_rhat - sigma * uhx * D1Phie +
                 uhx * w2v * (D1w2 - Krho_w2 * D2w2 + Krho * D2w1));

            const double F2 = Krho_w2 * D2w2 + (Krho - Kb) * D2w1 +
                              (1.0 / uhx) * (Krho * w3v * D2w3 + w3sq_over_rhat) +
                              (Kb / ub - Krho / uhx) * D2w4;

            const double d1x = 1.0 - M2;
            const double d3x = (1.0 + gamma * M2) * bg.force.g(x) / (c2b - ub * ub);
            const double d4x = (gamma - 1.0) * ubp / c2b;
            const double d5x = Kb / ub;

            out.F3(i, j) = F1 - (d1x * D1w1 - co.d1[i] * d1w1(i, j)) -
                           (d3x - co.d3[i]) * w1v - (d4x - co.d4[i]) * w4v -
                           Kb * (D2w2 - d2w2(i, j));
            out.F4(i, j) = F2 - (D1w2 - d1w2(i, j)) + Kb * (D2w1 - d2w1(i, j)) -
                           (d5x * D2w4 - co.d5[i] * d2w4(i, j));

            out.G1(i, j) = out.F3(i, j) - co.d4[i] * out.R4[j];
            out.G2(i, j) = out.F4(i, j) - co.d5[i] * dR4[j];
        }
        out.G2(i, 0) = 0.0; // odd symmetry across the axis
    }

    // --- Tail integrals of G2 and the boundary data of the potential.
    out.G2_tail = Field2D(n1 + 1, n2 + 1);
    std::vector<double> row(n2 + 1);
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) row[j] = out.G2(i, j);
        auto tail = tail_integral(row, h2g);
        for (int j = 0; j <= n2; ++j) out.G2_tail(i, j) = tail[j];
    }
    out.I0.assign(n2 + 1, 0.0);
    for (int j = 0; j <= n2; ++j) out.I0[j] = out.G2_tail(0, j);

    // Robin data: q2 = G2(Lb,.) + b4 h2, integrated from the wall.
    std::vector<double> q2(n2 + 1);
    for (int j = 0; j <= n2; ++j) q2[j] = out.G2(0, j) + co.b4 * out.h2[j];
    auto q2tail = tail_integral(q2, h2g);
    out.q2t.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) out.q2t[j] = co.b4 * out.R2[n2] - q2tail[j];

    // Exit data h3 and the Neumann profile q3t.
    const double ubL2 = co.ub[n1], rhobL2 = co.rho[n1], PbL2 = co.P[n1];
    out.h3.resize(n2 + 1);
    out.q3t.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        const double Pt = bg.gas.pressure(out.rho_hat(n1, j));
        const double ex = (gamma - 1.0) / gamma;
        const double E = gamma / (gamma - 1.0) *
                             (std::pow(Pt, ex) - std::pow(PbL2, ex)) -
                         (Pt - PbL2) / rhobL2 -
                         sigma * pert.Phi_e(geom.L2, out.rhat(n1, j));
        const double wsq = hat.w1(n1, j) * hat.w1(n1, j) +
                           hat.w2(n1, j) * hat.w2(n1, j) +
                           hat.w3(n1, j) * hat.w3(n1, j);
        out.h3[j] = out.R4[j] / ubL2 -
                    sigma * pert.P_ex(out.rhat(n1, j)) / (rhobL2 * ubL2) -
                    wsq / (2.0 * ubL2) - E / ubL2;
        out.q3t[j] = Kb * out.h3[j] - out.G2_tail(n1, j);
    }

    // Wall data.
    out.h4.resize(n1 + 1);
    for (int i = 0; i <= n1; ++i) {
        const double x = map.D0(co.z1[i], n2);
        out.h4[i] = sigma * pert.fprime(x) * (bg.sub(x).u + hat.w1(i, n2));
    }
    return out;
}

} // namespace axishock
