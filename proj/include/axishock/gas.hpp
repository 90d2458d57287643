#pragma once

#include <cmath>
#include <stdexcept>

namespace axishock {

/// Isentropic polytropic gas, P = rho^gamma (the pressure constant is
/// normalized to one).  All members are pure.
class GasLaw {
  public:
    explicit GasLaw(double gamma = 1.4) : gamma_(gamma) {
        if (!(gamma > 1.0))
            throw std::domain_error("GasLaw: gamma must exceed 1");
    }

    double gamma() const { return gamma_; }
    static constexpr double pressure_constant() { return 1.0; }

    /// P(rho) = rho^gamma.
    double pressure(double rho) const {
        require_positive(rho);
        return std::pow(rho, gamma_);
    }

    /// c^2(rho) = dP/drho = gamma rho^(gamma-1).
    double sound_speed_sq(double rho) const {
        require_positive(rho);
        return gamma_ * std::pow(rho, gamma_ - 1.0);
    }

    /// Density from pressure, rho = P^(1/gamma).
    double density_of_pressure(double P) const {
        require_positive(P);
        return std::pow(P, 1.0 / gamma_);
    }

    /// Specific enthalpy gamma P / ((gamma-1) rho) = gamma rho^(gamma-1)/(gamma-1).
    double enthalpy(double rho) const {
        require_positive(rho);
        return gamma_ / (gamma_ - 1.0) * std::pow(rho, gamma_ - 1.0);
    }

  private:
    static void require_positive(double v) {
        if (!(v > 0.0))
            throw std::domain_error("GasLaw: non-positive thermodynamic argument");
    }
    double gamma_;
};

/// Pointwise flow state of the axisymmetric system.
struct FlowState {
    double rho = 1.0;
    double u_x = 0.0;
    double u_r = 0.0;
    double u_theta = 0.0;
    double P = 1.0;

    double speed_sq() const { return u_x * u_x + u_r * u_r + u_theta * u_theta; }
};

/// Bernoulli quantity and the force potential at the same point.
struct BernoulliState {
    double B = 0.0;
    double Phi = 0.0;
};

/// B = |u|^2/2 + gamma P/((gamma-1) rho) - Phi.
inline double bernoulli(const GasLaw& gas, const FlowState& s, double Phi) {
    if (!(s.rho > 0.0 && s.P > 0.0))
        throw std::domain_error("bernoulli: invalid state");
    return 0.5 * s.speed_sq() + gas.gamma() / (gas.gamma() - 1.0) * s.P / s.rho - Phi;
}

/// Inverts the Bernoulli relation for the density:
/// rho = ((gamma-1)/gamma (B + Phi - |u|^2/2))^(1/(gamma-1)).
inline double density_from_bernoulli(const GasLaw& gas, double B, double Phi,
                                     double speed_sq) {
    const double g = gas.gamma();
    const double arg = B + Phi - 0.5 * speed_sq;
    if (!(arg > 0.0))
        throw std::domain_error("density_from_bernoulli: cavitation (non-positive argument)");
    return std::pow((g - 1.0) / g * arg, 1.0 / (g - 1.0));
}

} // namespace axishock
