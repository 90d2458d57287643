#include "axishock/upstream.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "axishock/errors.hpp"

namespace axishock {

PerturbationData PerturbationData::builtin(double sigma, double L1, double L2,
                                           const Amplitudes& amp) {
    if (sigma < 0.0) throw std::domain_error("PerturbationData: sigma must be >= 0");
    (void)L2;
    PerturbationData d;
    d.sigma = sigma;
    const double aw = amp.wall, af = amp.force;
    // Wall shape with f(L1) = f'(L1) = 0.
    d.f = [aw, L1](double x) { const double t = x - L1; return aw * t * t; };
    d.fprime = [aw, L1](double x) { return 2.0 * aw * (x - L1); };
    // Force perturbation (x-L1) q(r) with q'(0) = 0; vanishes at the inlet,
    // which keeps the inlet pressure compatibility condition homogeneous.
    auto q = [](double r) { return 1.0 + r * r * (1.0 - r * r); };
    auto qp = [](double r) { return 2.0 * r - 4.0 * r * r * r; };
    d.Phi_e = [af, L1, q](double x, double r) { return af * (x - L1) * q(r); };
    d.dPhi_e_dx = [af, q](double, double r) { return af * q(r); };
    d.dPhi_e_dr = [af, L1, qp](double x, double r) { return af * (x - L1) * qp(r); };
    // Inlet bumps: u, P even with vanishing slope at axis and wall;
    // v, w odd-leading cubics vanishing at the wall.
    d.u_en = [a = amp.u](double r) { const double t = 1.0 - r * r; return a * t * t; };
    d.v_en = [a = amp.v](double r) { const double t = 1.0 - r; return a * r * r * r * t * t; };
    d.w_en = [a = amp.w](double r) { const double t = 1.0 - r; return a * r * r * r * t * t; };
    d.P_en = [a = amp.P](double r) { const double t = 1.0 - r * r; return a * t * t; };
    // Exit pressure perturbation with vanishing slope at the axis.
    d.P_ex = [a = amp.exit](double r) { return a * r * r * (3.0 - 2.0 * r) / 4.0; };
    return d;
}

PerturbationData PerturbationData::none(double L1, double L2) {
    Amplitudes zero{};
    zero.wall = zero.force = zero.u = zero.v = zero.w = zero.P = zero.exit = 0.0;
    return builtin(0.0, L1, L2, zero);
}

UpstreamField::UpstreamField(GasLaw gas, double L1, double L2, double sigma,
                             std::function<double(double)> wallR, int n_x_cells, int nr_cells,
                             bool manufactured)
    : gas_(gas), L1_(L1), L2_(L2), sigma_(sigma), wallR_(std::move(wallR)),
      manufactured_(manufactured) {
    xs_.resize(n_x_cells + 1);
    for (int i = 0; i <= n_x_cells; ++i) xs_[i] = L1 + (L2 - L1) * i / n_x_cells;
    etas_.resize(nr_cells + 1);
    for (int j = 0; j <= nr_cells; ++j) etas_[j] = static_cast<double>(j) / nr_cells;
    ux_ = Field2D(n_x_cells + 1, nr_cells + 1);
    ur_ = Field2D(n_x_cells + 1, nr_cells + 1);
    ut_ = Field2D(n_x_cells + 1, nr_cells + 1);
    P_ = Field2D(n_x_cells + 1, nr_cells + 1);
}

FlowState UpstreamField::eval_impl(double x, double r, bool cubic) const {
    const double tol = 1e-10 * (L2_ - L1_);
    if (x < L1_ - tol || x > L2_ + tol)
        throw std::domain_error("UpstreamField: x outside the nozzle");
    x = std::clamp(x, L1_, L2_);
    const double R = wallR_(x);
    double eta = r / R;
    if (eta < -1e-10 || eta > 1.0 + 1e-8)
        throw std::domain_error("UpstreamField: r outside the nozzle");
    eta = std::clamp(eta, 0.0, 1.0);

    const int nxc = nx(), nrc = nr();
    const double hx = (L2_ - L1_) / nxc, he = 1.0 / nrc;
    const double tx = (x - L1_) / hx, te = eta / he;

    auto gather = [&](auto&& value_at) {
        // value_at(i, j) -> field value; returns interpolant at (tx, te)
        double out[4];
        if (!cubic) {
            int i0 = std::clamp(static_cast<int>(tx), 0, nxc - 1);
            int j0 = std::clamp(static_cast<int>(te), 0, nrc - 1);
            const double ax = tx - i0, ae = te - j0;
            for (int c = 0; c < 4; ++c) {
                auto v = [&](int i, int j) { return value_at(i, j, c); };
                out[c] = (1 - ax) * ((1 - ae) * v(i0, j0) + ae * v(i0, j0 + 1)) +
                         ax * ((1 - ae) * v(i0 + 1, j0) + ae * v(i0 + 1, j0 + 1));
            }
        } else {
            int i0 = std::clamp(static_cast<int>(tx) - 1, 0, std::max(0, nxc - 3));
            int j0 = std::clamp(static_cast<int>(te) - 1, 0, std::max(0, nrc - 3));
            const int pi = std::min(4, nxc + 1), pj = std::min(4, nrc + 1);
            double wx[4], we[4];
            auto lagrange = [](double t, int k0, int p, double* w) {
                for (int a = 0; a < p; ++a) {
                    double num = 1.0, den = 1.0;
                    for (int b = 0; b < p; ++b) {
                        if (a == b) continue;
                        num *= t - (k0 + b);
                        den *= static_cast<double>(a - b);
                    }
                    w[a] = num / den;
                }
            };
            lagrange(tx, i0, pi, wx);
            lagrange(te, j0, pj, we);
            for (int c = 0; c < 4; ++c) {
                double s = 0.0;
                for (int a = 0; a < pi; ++a)
                    for (int b = 0; b < pj; ++b)
                        s += wx[a] * we[b] * value_at(i0 + a, j0 + b, c);
                out[c] = s;
            }
        }
        return std::array<double, 4>{out[0], out[1], out[2], out[3]};
    };

    auto vals = gather([&](int i, int j, int c) {
        switch (c) {
            case 0: return ux_(i, j);
            case 1: return ur_(i, j);
            case 2: return ut_(i, j);
            default: return P_(i, j);
        }
    });
    FlowState s;
    s.u_x = vals[0];
    s.u_r = vals[1];
    s.u_theta = vals[2];
    s.P = vals[3];
    s.rho = gas_.density_of_pressure(s.P);
    return s;
}

FlowState UpstreamField::eval(double x, double r) const { return eval_impl(x, r, false); }
FlowState UpstreamField::eval_cubic(double x, double r) const { return eval_impl(x, r, true); }

double UpstreamField::mass_half_width() const {
    const int nrc = nr();
    const double he = 1.0 / nrc; // R(L1) = 1 by f(L1)=0
    std::vector<double> integrand(nrc + 1);
    for (int j = 0; j <= nrc; ++j) {
        const double s = etas_[j];
        integrand[j] = s * gas_.density_of_pressure(P_(0, j)) * ux_(0, j);
    }
    const double m2 = trapz(integrand, he);
    if (!(m2 > 0.0)) throw TransformFailure("UpstreamField: non-positive inlet mass integral");
    return std::sqrt(m2);
}

double UpstreamField::radius_from_mass(double x, double y2) const {
    if (y2 < 0.0) throw std::domain_error("radius_from_mass: negative mass radius");
    if (y2 == 0.0) return 0.0;
    const int nrc = nr();
    const double R = wallR_(x);
    // Slice of rho u_x at this x by cubic interpolation along x.
    std::vector<double> F(nrc + 1), r(nrc + 1);
    for (int j = 0; j <= nrc; ++j) {
        r[j] = etas_[j] * R;
        const FlowState s = eval_cubic(x, r[j]);
        if (!(s.u_x > 0.0))
            throw TransformFailure("radius_from_mass: non-positive axial flux");
        F[j] = s.rho * s.u_x;
    }
    // Exact cumulative integral of s * (linear interpolant of F).
    const double target = y2 * y2;
    double acc = 0.0;
    for (int j = 1; j <= nrc; ++j) {
        const double r0 = r[j - 1], r1 = r[j];
        const double b = (F[j] - F[j - 1]) / (r1 - r0);
        const double a = F[j - 1] - b * r0;
        auto I = [&](double s) {
            return a * (s * s - r0 * r0) / 2.0 + b * (s * s * s - r0 * r0 * r0) / 3.0;
        };
        const double cell = I(r1);
        if (acc + cell >= target || j == nrc) {
            double lo = r0, hi = r1;
            const double rem = target - acc;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (I(mid) < rem ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        acc += cell;
    }
    return r[nrc];
}

FlowState evaluate_upstream(const UpstreamField& field, double x, double r) {
    return field.eval(x, r);
}

namespace {

struct Slice {
    std::vector<double> ux, ur, ut, P;
    explicit Slice(int n) : ux(n), ur(n), ut(n), P(n) {}
};

/// Radial derivative with parity ghost at the axis and a one-sided
/// second-order closure at the wall.
std::vector<double> deta(const std::vector<double>& f, double h, AxisParity p) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(n);
    // Odd profiles have f = f'(0) r + f'''(0) r^3/6 + ..., so the two-point
    // combination below is fourth-order at the axis; keeping the axis value
    // extra accurate stops the marching step from depositing a slow-growing
    // curvature defect there.
    d[0] = (p == AxisParity::Even) ? 0.0 : (8.0 * f[1] - f[2]) / (6.0 * h);
    for (int j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2 * h);
    d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
    return d;
}

} // namespace

UpstreamField march_supersonic(const GasLaw& gas, const BackgroundSolution& bg,
                               const PerturbationData& data, const MarchOptions& opt) {
    const double L1 = bg.L1, L2 = bg.L2, sigma = data.sigma;
    const int nr = opt.nr;
    const double he = 1.0 / nr;
    const double gam = gas.gamma();

    // Total step count: at least the 1-D reference resolution, and fine
    // enough in x for the radial CFL bound.
    const State1D in0 = bg.sup(L1);
    const double c_in = std::sqrt(gas.sound_speed_sq(in0.rho));
    const double slope_est = (0.3 + c_in) / in0.u;
    int total = std::max({opt.nx, opt.min_total_steps,
                          static_cast<int>(std::ceil((L2 - L1) * slope_est / (opt.cfl * he)))});
    total = ((total + opt.nx - 1) / opt.nx) * opt.nx; // multiple of the output resolution

    UpstreamField out(gas, L1, L2, sigma,
                      [data](double x) { return data.wall_radius(x); }, total, nr, false);
    const double hx = (L2 - L1) / total;

    // Inlet data (R(L1) = 1, so eta = r there).
    Slice U(nr + 1);
    for (int j = 0; j <= nr; ++j) {
        const double r = he * j;
        U.ux[j] = in0.u + sigma * data.u_en(r);
        U.ur[j] = sigma * data.v_en(r);
        U.ut[j] = sigma * data.w_en(r);
        U.P[j] = in0.P + sigma * data.P_en(r);
    }

    auto apply_bc = [&](Slice& S, double x) {
        S.ur[0] = 0.0;
        S.ut[0] = 0.0;
        S.ur[nr] = data.wall_slope(x) * S.ux[nr];
    };
    apply_bc(U, L1);

    // d/dx at fixed eta of all four variables.
    auto rhs = [&](const Slice& S, double x) {
        Slice D(nr + 1);
        const double R = data.wall_radius(x);
        const double Rp = data.wall_slope(x);
        const auto dux = deta(S.ux, he, AxisParity::Even);
        const auto dur = deta(S.ur, he, AxisParity::Odd);
        const auto dut = deta(S.ut, he, AxisParity::Odd);
        const auto dP = deta(S.P, he, AxisParity::Even);
        std::vector<double> q(nr + 1);
        for (int j = 0; j <= nr; ++j)
            q[j] = gas.density_of_pressure(S.P[j]) * S.ur[j];
        const auto dq = deta(q, he, AxisParity::Odd);

        for (int j = 0; j <= nr; ++j) {
            const double eta = he * j, r = eta * R;
            const double rho = gas.density_of_pressure(S.P[j]);
            const double c2 = gam * std::pow(rho, gam - 1.0);
            const double ux = S.ux[j], ur = S.ur[j], ut = S.ut[j];
            if (ux * ux / c2 - 1.0 < opt.sonic_margin)
                throw MarchingFailure("march_supersonic: loss of axial hyperbolicity at x = " +
                                      std::to_string(x));
            const double dr_ux = dux[j] / R, dr_ur = dur[j] / R, dr_ut = dut[j] / R;
            const double dr_P = dP[j] / R, dr_q = dq[j] / R;
            const double dPhix = bg.force.g(x) + sigma * data.dPhi_e_dx(x, r);
            const double dPhir = sigma * data.dPhi_e_dr(x, r);

            // Axial momentum and mass give a 2x2 system for (dx u_x, dx P).
            const double A1 = rho * dPhix - rho * ur * dr_ux;
            const double A2 = (j == 0) ? -2.0 * dr_q : -(q[j] / r + dr_q);
            const double det = rho * (ux * ux / c2 - 1.0);
            const double dx_ux = (A1 * ux / c2 - A2) / det;
            const double dx_P = (rho * A2 * ux - rho * A1) / det;

            // Radial momentum and swirl transport.
            double dx_ur, dx_ut;
            if (j == 0) {
                dx_ur = 0.0;
                dx_ut = 0.0;
            } else {
                dx_ur = (rho * dPhir + rho * ut * ut / r - dr_P - rho * ur * dr_ur) / (rho * ux);
                dx_ut = -(ur * dr_ut + ur * ut / r) / ux;
            }

            // Convert d/dx at fixed r to fixed eta.
            const double shift = eta * Rp / R;
            D.ux[j] = dx_ux + shift * dux[j];
            D.ur[j] = dx_ur + shift * dur[j];
            D.ut[j] = dx_ut + shift * dut[j];
            D.P[j] = dx_P + shift * dP[j];
        }
        return D;
    };

    auto axpy = [&](const Slice& S, double a, const Slice& D, double x_eval) {
        Slice R2(nr + 1);
        for (int j = 0; j <= nr; ++j) {
            R2.ux[j] = S.ux[j] + a * D.ux[j];
            R2.ur[j] = S.ur[j] + a * D.ur[j];
            R2.ut[j] = S.ut[j] + a * D.ut[j];
            R2.P[j] = S.P[j] + a * D.P[j];
        }
        apply_bc(R2, x_eval);
        return R2;
    };

    auto store = [&](const Slice& S, int i) {
        for (int j = 0; j <= nr; ++j) {
            out.ux()(i, j) = S.ux[j];
            out.ur()(i, j) = S.ur[j];
            out.ut()(i, j) = S.ut[j];
            out.P()(i, j) = S.P[j];
        }
    };
    store(U, 0);

    for (int i = 0; i < total; ++i) {
        const double x = L1 + i * hx;
        const Slice k1 = rhs(U, x);
        const Slice k2 = rhs(axpy(U, 0.5 * hx, k1, x + 0.5 * hx), x + 0.5 * hx);
        const Slice k3 = rhs(axpy(U, 0.5 * hx, k2, x + 0.5 * hx), x + 0.5 * hx);
        const Slice k4 = rhs(axpy(U, hx, k3, x + hx), x + hx);
        Slice next(nr + 1);
        for (int j = 0; j <= nr; ++j) {
            next.ux[j] = U.ux[j] + hx / 6.0 * (k1.ux[j] + 2 * k2.ux[j] + 2 * k3.ux[j] + k4.ux[j]);
            next.ur[j] = U.ur[j] + hx / 6.0 * (k1.ur[j] + 2 * k2.ur[j] + 2 * k3.ur[j] + k4.ur[j]);
            next.ut[j] = U.ut[j] + hx / 6.0 * (k1.ut[j] + 2 * k2.ut[j] + 2 * k3.ut[j] + k4.ut[j]);
            next.P[j] = U.P[j] + hx / 6.0 * (k1.P[j] + 2 * k2.P[j] + 2 * k3.P[j] + k4.P[j]);
        }
        apply_bc(next, x + hx);
        U = next;
        store(U, i + 1);
    }
    return out;
}

UpstreamField analytic_upstream(const GasLaw& gas, const BackgroundSolution& bg,
                                const PerturbationData& data, int nx, int nr) {
    UpstreamField out(gas, bg.L1, bg.L2, data.sigma,
                      [data](double x) { return data.wall_radius(x); }, nx, nr, true);
    for (int i = 0; i <= nx; ++i) {
        const double x = out.x_nodes()[i];
        const State1D s = bg.sup(x);
        for (int j = 0; j <= nr; ++j) {
            const double eta = out.eta_nodes()[j];
            out.ux()(i, j) = s.u + data.sigma * data.u_en(eta);
            out.ur()(i, j) = data.sigma * data.v_en(eta);
            out.ut()(i, j) = data.sigma * data.w_en(eta);
            out.P()(i, j) = s.P + data.sigma * data.P_en(eta);
        }
    }
    return out;
}

} // namespace axishock
