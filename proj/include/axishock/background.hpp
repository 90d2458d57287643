#pragma once

#include <functional>
#include <vector>

#include "axishock/gas.hpp"

namespace axishock {

/// External axial force g(x) > 0 together with its potential
/// Phi_b(x) = int_{L1}^x g.
struct ForceProfile {
    std::function<double(double)> g;
    std::function<double(double)> Phi; ///< antiderivative with Phi(L1) = 0

    static ForceProfile constant(double g0, double L1);
    static ForceProfile linear(double g0, double g1, double L1, double L2);
    static ForceProfile tabulated(std::vector<double> x, std::vector<double> gv);
};

/// One-dimensional thermodynamic state (no transverse velocity).
struct State1D {
    double rho = 1.0;
    double u = 0.0;
    double P = 1.0;
};

/// A single integrated branch of the duct ODE, sampled uniformly and
/// evaluated by cubic Hermite interpolation (node derivatives come from
/// the ODE right-hand side, so evaluation is effectively 4th order).
class Branch1D {
  public:
    Branch1D() = default;
    Branch1D(double x0, double x1, std::vector<double> u, std::vector<double> uprime,
             double mass_flux, double gamma);

    double x0() const { return x0_; }
    double x1() const { return x1_; }
    int steps() const { return static_cast<int>(u_.size()) - 1; }
    double mass_flux() const { return m_; }
    const std::vector<double>& u_nodes() const { return u_; }

    bool contains(double x) const;
    double u(double x) const;
    double u_prime(double x) const;
    State1D state(double x) const;

  private:
    double x0_ = 0.0, x1_ = 1.0, m_ = 1.0, gamma_ = 1.4;
    std::vector<double> u_, up_;
};

/// Background transonic shock: supersonic branch on [L1,L2], subsonic
/// branch on [x_sub_min, L2] (extended upstream of the shock as far as
/// the sonic guard allows), shock position Lb.
struct BackgroundSolution {
    GasLaw gas{1.4};
    ForceProfile force;
    double L1 = 0.0, L2 = 1.0;
    double Lb = 0.5;
    double mass_flux = 1.0;
    double exit_pressure = 1.0;
    double P_bracket_lo = 0.0, P_bracket_hi = 0.0; ///< admissible (P1, P2)

    Branch1D supersonic; ///< on [L1, L2]
    Branch1D sub_down;   ///< on [Lb, L2]
    Branch1D sub_up;     ///< on [x_sub_min, Lb] (may be empty)

    State1D minus_at_shock, plus_at_shock;

    double x_sub_min() const { return sub_up.steps() > 0 ? sub_up.x0() : Lb; }

    State1D sup(double x) const { return supersonic.state(x); }
    State1D sub(double x) const;
    double sub_u_prime(double x) const;
    double Phi_b(double x) const { return force.Phi(x); }
    /// Bernoulli invariant of the subsonic branch (with force potential).
    double B_plus() const;
    double entropy_jump() const { return plus_at_shock.P - minus_at_shock.P; }
};

/// Options shared by the branch integrator and the shooting solve.
struct BackgroundOptions {
    int ode_steps = 2048;       ///< RK4 steps across [L1, L2]
    double sonic_guard = 1e-6;  ///< abort when |1 - M^2| falls below this
    double shoot_tol = 1e-12;   ///< bisection bracket width, relative to L2-L1
    double bracket_margin = 0.005; ///< (P1,P2) probed at L1/L2 offset by this fraction
};

/// Integrates the scalar duct ODE (u - c^2(m/u)/u) u' = g from x0 to x1
/// (either direction) starting from `start`.  Throws SonicDegeneracy when
/// the sonic guard triggers.
Branch1D integrate_branch(const GasLaw& gas, const State1D& start, double x0, double x1,
                          const ForceProfile& force, int steps, double sonic_guard = 1e-6);

/// Rankine-Hugoniot jump of a supersonic 1-D state to the subsonic state
/// with the same mass flux: m^2/rho + rho^gamma conserved, rho+ > rho-.
State1D shock_jump_1d(const GasLaw& gas, const State1D& upstream, double tol = 1e-13);

/// Exit pressure produced by placing the shock at s.  `sup` must cover
/// [L1, s].
double exit_pressure_of_shock_position(const GasLaw& gas, const Branch1D& sup, double s,
                                       double L2, const ForceProfile& force,
                                       const BackgroundOptions& opt = {});

/// Full background construction: shoots on the shock position so that the
/// exit pressure matches P_e.  Throws AdmissibilityError outside (P1,P2).
BackgroundSolution solve_background(const GasLaw& gas, double P_e, const State1D& inlet,
                                    const ForceProfile& force, double L1, double L2,
                                    const BackgroundOptions& opt = {});

} // namespace axishock
