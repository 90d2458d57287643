#include "axishock/solver.hpp"

#include <cmath>

#include "axishock/errors.hpp"
#include "axishock/transform.hpp"

namespace axishock {

SubsonicProblem make_subsonic_problem(const BackgroundSolution& bg, const UpstreamField& up,
                                      const PerturbationData& pert, int n1) {
    SubsonicProblem pb;
    pb.bg = &bg;
    pb.up = &up;
    pb.pert = &pert;
    pb.geom = make_mass_geometry(bg, up.mass_half_width());
    pb.co = compute_coefficients(bg, pb.geom, n1);
    return pb;
}

RecoveredVelocity recover_velocity(const EllipticSolution& sol, const EllipticProblem& prob,
                                   const RemainderBundle& rb, const CoefficientTable& co) {
    const int n1 = prob.n1(), n2 = prob.n2();
    const double h1 = prob.h1(), h2 = prob.h2();
    const Field2D& phi = sol.phi_star;

    // Axial derivative of the potential: boundary rows use the Robin and
    // Neumann conditions exactly, interior rows are centred.
    Field2D dphi1(n1 + 1, n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        dphi1(0, j) = prob.b5 * phi(0, j) + prob.q2t[j];
        dphi1(n1, j) = prob.q3t[j];
        for (int i = 1; i < n1; ++i)
            dphi1(i, j) = (phi(i + 1, j) - phi(i - 1, j)) / (2.0 * h1);
    }

    RecoveredVelocity rv;
    rv.w1 = Field2D(n1 + 1, n2 + 1);
    rv.w2 = Field2D(n1 + 1, n2 + 1);
    for (int i = 0; i <= n1; ++i) {
        const double mu = co.mu(i);
        for (int j = 0; j <= n2; ++j) {
            rv.w1(i, j) = (dphi1(i, j) + mu * dphi1(0, j) + rb.G2_tail(i, j) +
                           mu * rb.I0[j]) /
                          co.d2[i];
            if (j == 0)
                rv.w2(i, j) = 0.0; // odd across the axis
            else if (j == n2)
                rv.w2(i, j) = prob.h4[i]; // wall condition
            else
                rv.w2(i, j) = (phi(i, j + 1) - phi(i, j - 1)) / (2.0 * h2);
        }
    }
    return rv;
}

ShockCurve update_shock(const std::vector<double>& w1_trace, const RemainderBundle& rb,
                        const CoefficientTable& co, const MassGeometry& geom) {
    const int n2 = static_cast<int>(w1_trace.size()) - 1;
    ShockCurve w5;
    w5.M = geom.M;
    w5.w5.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) w5.w5[j] = (w1_trace[j] - rb.R2[j]) / co.b2;
    if (w5.max_abs() >= 0.5 * (geom.L2 - geom.Lb))
        throw SolverError("update_shock: front leaves the duct");
    return w5;
}

double shock_slope_mismatch(const ShockCurve& w5, const std::vector<double>& w2_trace,
                            const RemainderBundle& rb, const CoefficientTable& co) {
    auto d = w5.w5_prime();
    double worst = 0.0;
    for (size_t j = 0; j < d.size(); ++j)
        worst = std::max(worst,
                         std::abs(d[j] - (co.a1 * w2_trace[j] + rb.h1[j])));
    return worst;
}

Field2D transport_swirl(const RemainderBundle& rb) {
    const int n1 = rb.rhat.n1() - 1, n2 = rb.rhat.n2() - 1;
    Field2D w3(n1 + 1, n2 + 1, 0.0);
    for (int i = 0; i <= n1; ++i)
        for (int j = 1; j <= n2; ++j)
            w3(i, j) = rb.trace.r[j] * rb.trace.ut[j] / rb.rhat(i, j);
    return w3;
}

Field2D transport_bernoulli(const std::vector<double>& w1_trace, const RemainderBundle& rb,
                            const CoefficientTable& co) {
    const int n2 = static_cast<int>(w1_trace.size()) - 1;
    const int n1 = co.n1();
    Field2D w4(n1 + 1, n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        const double v = co.b3 / co.b2 * w1_trace[j] + rb.R4[j];
        for (int i = 0; i <= n1; ++i) w4(i, j) = v;
    }
    return w4;
}

Iterate apply_update_map(const Iterate& hat, const SubsonicProblem& pb,
                         const SolverOptions& opts, ApplyReport* report) {
    RemainderBundle rb =
        nonlinear_remainders(hat, *pb.up, *pb.bg, pb.co, pb.geom, *pb.pert);
    EllipticProblem ep = build_elliptic_problem(rb, pb.co, pb.geom);
    EllipticSolution es = (opts.backend == EllipticBackend::FD)
                              ? solve_elliptic_fd(ep)
                              : solve_elliptic_modes(ep, opts.n_modes);
    RecoveredVelocity rv = recover_velocity(es, ep, rb, pb.co);

    const int n2 = ep.n2();
    std::vector<double> w1_trace(n2 + 1), w2_trace(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        w1_trace[j] = rv.w1(0, j);
        w2_trace[j] = rv.w2(0, j);
    }

    Iterate out;
    out.w1 = std::move(rv.w1);
    out.w2 = std::move(rv.w2);
    out.w5 = update_shock(w1_trace, rb, pb.co, pb.geom);
    out.w5.Lambda = es.Lambda;
    out.w4 = transport_bernoulli(w1_trace, rb, pb.co);
    out.w3 = transport_swirl(rb);

    if (report) {
        report->Lambda = es.Lambda;
        report->elliptic_residual = es.residual;
        report->slope_mismatch = shock_slope_mismatch(out.w5, w2_trace, rb, pb.co);
    }
    return out;
}

namespace {

double diff_norm(const Iterate& a, const Iterate& b) {
    Iterate d = a;
    for (int i = 0; i < d.w1.n1(); ++i)
        for (int j = 0; j < d.w1.n2(); ++j) {
            d.w1(i, j) -= b.w1(i, j);
            d.w2(i, j) -= b.w2(i, j);
            d.w3(i, j) -= b.w3(i, j);
            d.w4(i, j) -= b.w4(i, j);
        }
    for (size_t j = 0; j < d.w5.w5.size(); ++j) d.w5.w5[j] -= b.w5.w5[j];
    return d.norm();
}

} // namespace

SubsonicSolution solve_subsonic(const BackgroundSolution& bg, const UpstreamField& up,
                                const PerturbationData& pert, const SolverOptions& opts) {
    SubsonicSolution sol;
    sol.bg = bg;
    sol.up = up;
    sol.pert = pert;
    sol.problem = make_subsonic_problem(sol.bg, sol.up, sol.pert, opts.n1);
    Iterate cur = Iterate::zero(opts.n1, opts.n2, sol.problem.geom.M);

    double prev_delta = 0.0;
    int expanding = 0;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        IterationRecord rec;
        rec.iter = iter;
        Iterate next = apply_update_map(cur, sol.problem, opts, &rec.report);
        rec.delta = diff_norm(next, cur);
        rec.norm = next.norm();
        rec.ratio = (prev_delta > 0.0) ? rec.delta / prev_delta : 0.0;
        sol.history.push_back(rec);
        cur = std::move(next);
        sol.iterations = iter;
        sol.final_delta = rec.delta;
        if (rec.delta < opts.tol) {
            sol.converged = true;
            break;
        }
        if (iter > 1 && rec.ratio >= 1.0) {
            if (++expanding >= 3) {
                std::vector<double> ratios;
                for (const auto& r : sol.history) ratios.push_back(r.ratio);
                throw DivergenceError(
                    std::move(ratios),
                    "solve_subsonic: iteration expands for three consecutive steps "
                    "(perturbation too large)");
            }
        } else {
            expanding = 0;
        }
        prev_delta = rec.delta;
    }
    sol.it = std::move(cur);
    sol.rb = nonlinear_remainders(sol.it, up, bg, sol.problem.co, sol.problem.geom, pert);
    return sol;
}

PhysicalFields assemble_physical_solution(const SubsonicSolution& sol) {
    const SubsonicProblem& pb = sol.problem;
    const Iterate& it = sol.it;
    const int n1 = it.w1.n1() - 1, n2 = it.w1.n2() - 1;
    const double h2 = pb.geom.M / n2;

    PhysicalFields ph;
    ph.z1 = pb.co.z1;
    ph.z2.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) ph.z2[j] = h2 * j;

    DomainMap map(it.w5, pb.geom.Lb, pb.geom.L2);
    ph.X = Field2D(n1 + 1, n2 + 1);
    ph.R = Field2D(n1 + 1, n2 + 1);
    ph.ux = ph.X;
    ph.ur = ph.X;
    ph.ut = ph.X;
    ph.rho = ph.X;
    ph.P = ph.X;
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) {
            const double y1 = map.D0(pb.co.z1[i], j);
            ph.X(i, j) = y1;
            ph.R(i, j) = sol.rb.rhat(i, j);
            ph.ux(i, j) = sol.bg.sub(y1).u + it.w1(i, j);
            ph.ur(i, j) = it.w2(i, j);
            ph.ut(i, j) = it.w3(i, j);
            ph.rho(i, j) = sol.rb.rho_hat(i, j);
            ph.P(i, j) = sol.bg.gas.pressure(ph.rho(i, j));
        }

    ph.shock_x.resize(n2 + 1);
    ph.shock_r.resize(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        ph.shock_x[j] = pb.geom.Lb + it.w5.w5[j];
        ph.shock_r[j] = sol.rb.trace.r[j];
    }

    ph.gamma = sol.bg.gas.gamma();
    const UpstreamField& up = sol.up;
    ph.up_x = up.x_nodes();
    ph.up_eta = up.eta_nodes();
    ph.up_wallR.resize(ph.up_x.size());
    for (size_t i = 0; i < ph.up_x.size(); ++i)
        ph.up_wallR[i] = up.wall_radius(ph.up_x[i]);
    ph.up_ux = up.ux();
    ph.up_ur = up.ur();
    ph.up_ut = up.ut();
    ph.up_P = up.P();
    ph.up_rho = ph.up_P;
    for (double& v : ph.up_rho.data()) v = sol.bg.gas.density_of_pressure(v);

    ph.force_g = sol.bg.force.g;
    const double sig = sol.pert.sigma;
    ph.dPhi_x = [sig, f = sol.pert.dPhi_e_dx](double x, double r) {
        return sig * f(x, r);
    };
    ph.dPhi_r = [sig, f = sol.pert.dPhi_e_dr](double x, double r) {
        return sig * f(x, r);
    };
    return ph;
}

} // namespace axishock
