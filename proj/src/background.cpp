#include "axishock/background.hpp"

#include <algorithm>
#include <cmath>

#include "axishock/errors.hpp"

namespace axishock {

ForceProfile ForceProfile::constant(double g0, double L1) {
    ForceProfile f;
    f.g = [g0](double) { return g0; };
    f.Phi = [g0, L1](double x) { return g0 * (x - L1); };
    return f;
}

ForceProfile ForceProfile::linear(double g0, double g1, double L1, double L2) {
    const double slope = (g1 - g0) / (L2 - L1);
    ForceProfile f;
    f.g = [g0, slope, L1](double x) { return g0 + slope * (x - L1); };
    f.Phi = [g0, slope, L1](double x) {
        const double t = x - L1;
        return g0 * t + 0.5 * slope * t * t;
    };
    return f;
}

ForceProfile ForceProfile::tabulated(std::vector<double> x, std::vector<double> gv) {
    if (x.size() != gv.size() || x.size() < 2)
        throw std::invalid_argument("ForceProfile::tabulated: need matching tables, size >= 2");
    // Cumulative trapezoid for the potential at the table nodes.
    std::vector<double> Phi(x.size(), 0.0);
    for (size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1]))
            throw std::invalid_argument("ForceProfile::tabulated: x must be strictly increasing");
        Phi[i] = Phi[i - 1] + 0.5 * (x[i] - x[i - 1]) * (gv[i] + gv[i - 1]);
    }
    auto interp = [](const std::vector<double>& xs, const std::vector<double>& ys, double q) {
        auto it = std::upper_bound(xs.begin(), xs.end(), q);
        size_t k = std::clamp<size_t>(static_cast<size_t>(it - xs.begin()), 1, xs.size() - 1);
        const double t = (q - xs[k - 1]) / (xs[k] - xs[k - 1]);
        return ys[k - 1] + t * (ys[k] - ys[k - 1]);
    };
    ForceProfile f;
    f.g = [x, gv, interp](double q) { return interp(x, gv, q); };
    // Piecewise-quadratic potential consistent with the linear interpolant of g.
    f.Phi = [x, gv, Phi, interp](double q) {
        auto it = std::upper_bound(x.begin(), x.end(), q);
        size_t k = std::clamp<size_t>(static_cast<size_t>(it - x.begin()), 1, x.size() - 1);
        const double h = q - x[k - 1];
        const double gq = interp(x, gv, q);
        return Phi[k - 1] + 0.5 * h * (gv[k - 1] + gq);
    };
    return f;
}

Branch1D::Branch1D(double x0, double x1, std::vector<double> u, std::vector<double> uprime,
                   double mass_flux, double gamma)
    : x0_(x0), x1_(x1), m_(mass_flux), gamma_(gamma), u_(std::move(u)), up_(std::move(uprime)) {}

bool Branch1D::contains(double x) const {
    const double tol = 1e-9 * (std::abs(x1_ - x0_) + 1.0);
    return x >= x0_ - tol && x <= x1_ + tol;
}

double Branch1D::u(double x) const {
    const int n = steps();
    const double h = (x1_ - x0_) / n;
    double t = (x - x0_) / h;
    int k = static_cast<int>(std::floor(t));
    k = std::clamp(k, 0, n - 1);
    t -= k;
    // Cubic Hermite on cell k.
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * u_[k] + h * h10 * up_[k] + h01 * u_[k + 1] + h * h11 * up_[k + 1];
}

double Branch1D::u_prime(double x) const {
    const int n = steps();
    const double h = (x1_ - x0_) / n;
    double t = (x - x0_) / h;
    int k = static_cast<int>(std::floor(t));
    k = std::clamp(k, 0, n - 1);
    t -= k;
    const double d00 = (6 * t * t - 6 * t) / h;
    const double d10 = 3 * t * t - 4 * t + 1;
    const double d01 = (6 * t - 6 * t * t) / h;
    const double d11 = 3 * t * t - 2 * t;
    return d00 * u_[k] + d10 * up_[k] + d01 * u_[k + 1] + d11 * up_[k + 1];
}

State1D Branch1D::state(double x) const {
    const double uu = u(x);
    State1D s;
    s.u = uu;
    s.rho = m_ / uu;
    s.P = std::pow(s.rho, gamma_);
    return s;
}

namespace {

/// Right-hand side of the scalar duct ODE, u' = g / (u - c^2(m/u)/u).
double branch_rhs(const GasLaw& gas, double m, double u, double g, double sonic_guard) {
    if (!(u > 0.0)) throw std::domain_error("integrate_branch: cavitation (u <= 0)");
    const double rho = m / u;
    const double c2 = gas.sound_speed_sq(rho);
    const double M2 = u * u / c2;
    if (std::abs(1.0 - M2) < sonic_guard)
        throw SonicDegeneracy("integrate_branch: sonic guard triggered, |1 - M^2| = " +
                              std::to_string(std::abs(1.0 - M2)));
    return g / (u - c2 / u);
}

} // namespace

Branch1D integrate_branch(const GasLaw& gas, const State1D& start, double x0, double x1,
                          const ForceProfile& force, int steps, double sonic_guard) {
    if (steps < 1) throw std::invalid_argument("integrate_branch: steps < 1");
    const double m = start.rho * start.u;
    const double h = (x1 - x0) / steps;
    std::vector<double> u(steps + 1), up(steps + 1);
    u[0] = start.u;
    auto rhs = [&](double x, double v) {
        return branch_rhs(gas, m, v, force.g(x), sonic_guard);
    };
    up[0] = rhs(x0, u[0]);
    for (int k = 0; k < steps; ++k) {
        const double x = x0 + k * h;
        const double k1 = rhs(x, u[k]);
        const double k2 = rhs(x + 0.5 * h, u[k] + 0.5 * h * k1);
        const double k3 = rhs(x + 0.5 * h, u[k] + 0.5 * h * k2);
        const double k4 = rhs(x + h, u[k] + h * k3);
        u[k + 1] = u[k] + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        up[k + 1] = rhs(x + h, u[k + 1]);
    }
    if (x1 >= x0) return Branch1D(x0, x1, std::move(u), std::move(up), m, gas.gamma());
    // Backwards integration: store ascending in x.
    std::reverse(u.begin(), u.end());
    std::reverse(up.begin(), up.end());
    return Branch1D(x1, x0, std::move(u), std::move(up), m, gas.gamma());
}

State1D shock_jump_1d(const GasLaw& gas, const State1D& upstream, double tol) {
    const double m = upstream.rho * upstream.u;
    const double g = gas.gamma();
    const double c2 = gas.sound_speed_sq(upstream.rho);
    if (upstream.u * upstream.u < c2 * (1.0 - 1e-12))
        throw JumpFailure("shock_jump_1d: upstream state is not supersonic");
    // Momentum-flux function G(rho) = m^2/rho + rho^gamma; conserve G across
    // the jump.  G decreases up to the sonic density then increases, so the
    // subsonic root lies above rho_sonic.
    const double target = m * m / upstream.rho + std::pow(upstream.rho, g);
    const double rho_sonic = std::pow(m * m / g, 1.0 / (g + 1.0));
    if (rho_sonic <= upstream.rho * (1.0 + 1e-13)) {
        return upstream; // at (or numerically at) the sonic point the roots coincide
    }
    auto G = [&](double rho) { return m * m / rho + std::pow(rho, g) - target; };
    double lo = rho_sonic, hi = std::max(2.0 * rho_sonic, 2.0 * upstream.rho);
    int expand = 0;
    while (G(hi) < 0.0) {
        hi *= 2.0;
        if (++expand > 200) throw JumpFailure("shock_jump_1d: no subsonic root bracketed");
    }
    for (int it = 0; it < 200 && (hi - lo) > tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (G(mid) < 0.0 ? lo : hi) = mid;
    }
    State1D down;
    down.rho = 0.5 * (lo + hi);
    down.u = m / down.rho;
    down.P = std::pow(down.rho, g);
    return down;
}

double exit_pressure_of_shock_position(const GasLaw& gas, const Branch1D& sup, double s,
                                       double L2, const ForceProfile& force,
                                       const BackgroundOptions& opt) {
    const State1D minus = sup.state(s);
    const State1D plus = shock_jump_1d(gas, minus);
    Branch1D down = integrate_branch(gas, plus, s, L2, force, opt.ode_steps, opt.sonic_guard);
    return down.state(L2).P;
}

State1D BackgroundSolution::sub(double x) const {
    if (x >= Lb || sub_up.steps() == 0) return sub_down.state(std::max(x, sub_down.x0()));
    return sub_up.state(std::max(x, sub_up.x0()));
}

double BackgroundSolution::sub_u_prime(double x) const {
    // The ODE gives the derivative exactly from the state.
    const State1D s = sub(x);
    const double c2 = gas.sound_speed_sq(s.rho);
    return force.g(x) / (s.u - c2 / s.u);
}

double BackgroundSolution::B_plus() const {
    const State1D s = plus_at_shock;
    const double g = gas.gamma();
    return 0.5 * s.u * s.u + g / (g - 1.0) * std::pow(s.rho, g - 1.0) - Phi_b(Lb);
}

BackgroundSolution solve_background(const GasLaw& gas, double P_e, const State1D& inlet,
                                    const ForceProfile& force, double L1, double L2,
                                    const BackgroundOptions& opt) {
    const double c2_in = gas.sound_speed_sq(inlet.rho);
    if (!(inlet.u * inlet.u > c2_in))
        throw std::domain_error("solve_background: inlet must be supersonic");

    Branch1D sup = integrate_branch(gas, inlet, L1, L2, force, opt.ode_steps, opt.sonic_guard);

    const double dx = opt.bracket_margin * (L2 - L1);
    auto Pexit = [&](double s) {
        return exit_pressure_of_shock_position(gas, sup, s, L2, force, opt);
    };
    const double P1 = Pexit(L2 - dx); // shock near the exit: lowest admissible pressure
    const double P2 = Pexit(L1 + dx); // shock near the inlet: highest admissible pressure
    if (!(P_e > P1 && P_e < P2))
        throw AdmissibilityError(P1, P2,
                                 "solve_background: exit pressure outside admissible bracket (" +
                                     std::to_string(P1) + ", " + std::to_string(P2) + ")");

    // Exit pressure decreases in s, so bisect on the sign of Pexit(s) - P_e.
    double lo = L1 + dx, hi = L2 - dx;
    while ((hi - lo) > opt.shoot_tol * (L2 - L1)) {
        const double mid = 0.5 * (lo + hi);
        (Pexit(mid) > P_e ? lo : hi) = mid;
    }
    const double Lb = 0.5 * (lo + hi);

    BackgroundSolution bg;
    bg.gas = gas;
    bg.force = force;
    bg.L1 = L1;
    bg.L2 = L2;
    bg.Lb = Lb;
    bg.mass_flux = inlet.rho * inlet.u;
    bg.exit_pressure = P_e;
    bg.P_bracket_lo = P1;
    bg.P_bracket_hi = P2;
    bg.supersonic = std::move(sup);
    bg.minus_at_shock = bg.supersonic.state(Lb);
    bg.plus_at_shock = shock_jump_1d(gas, bg.minus_at_shock);

    const double h_ref = (L2 - L1) / opt.ode_steps;
    const int n_down = std::max(2, static_cast<int>(std::lround((L2 - Lb) / h_ref)));
    bg.sub_down = integrate_branch(gas, bg.plus_at_shock, Lb, L2, force, n_down, opt.sonic_guard);

    // Extend the subsonic branch upstream of the shock as far as the sonic
    // guard allows: probe with exponentially shrinking steps.
    double x_lo = Lb;
    {
        State1D s = bg.plus_at_shock;
        double x = Lb;
        const double probe_h = h_ref;
        const double margin = 2e-3; // stay clear of the sonic line while probing
        try {
            while (x - probe_h >= L1 - 1e-14) {
                Branch1D step = integrate_branch(gas, s, x, x - probe_h, force, 4, margin);
                x -= probe_h;
                s = step.state(x);
            }
        } catch (const SonicDegeneracy&) {
            // stop the extension just short of the sonic line
        }
        x_lo = x;
    }
    if (x_lo < Lb - h_ref) {
        const int n_up = std::max(2, static_cast<int>(std::lround((Lb - x_lo) / h_ref)));
        bg.sub_up =
            integrate_branch(gas, bg.plus_at_shock, Lb, x_lo, force, n_up, opt.sonic_guard);
    }
    return bg;
}

} // namespace axishock
