#pragma once

#include <functional>
#include <vector>

#include "axishock/background.hpp"
#include "axishock/gas.hpp"
#include "axishock/grid.hpp"

namespace axishock {

/// Relative amplitudes of the built-in perturbation shapes.
struct PerturbationAmplitudes {
    double wall = 1.0, force = 1.0;
    double u = 1.0, v = 1.0, w = 1.0, P = 1.0, exit = 1.0;
};

/// Perturbation data of the problem: wall shape, force perturbation,
/// inlet perturbations (functions of r on [0,1]) and the exit pressure
/// perturbation.  All functions are the *unit* shapes; sigma scales them.
struct PerturbationData {
    double sigma = 0.0;

    std::function<double(double)> f;      ///< wall shape, f(L1)=f'(L1)=0
    std::function<double(double)> fprime;

    std::function<double(double, double)> Phi_e;      ///< force perturbation (x,r)
    std::function<double(double, double)> dPhi_e_dx;
    std::function<double(double, double)> dPhi_e_dr;

    std::function<double(double)> u_en; ///< inlet axial velocity perturbation
    std::function<double(double)> v_en; ///< inlet radial velocity perturbation
    std::function<double(double)> w_en; ///< inlet swirl perturbation
    std::function<double(double)> P_en; ///< inlet pressure perturbation
    std::function<double(double)> P_ex; ///< exit pressure perturbation

    using Amplitudes = PerturbationAmplitudes;

    /// Smooth polynomial shapes satisfying the wall and inlet/axis
    /// compatibility constraints.
    static PerturbationData builtin(double sigma, double L1, double L2,
                                    const PerturbationAmplitudes& amp = {});
    /// All shapes zero (pure background).
    static PerturbationData none(double L1, double L2);

    double wall_radius(double x) const { return 1.0 + sigma * f(x); }
    double wall_slope(double x) const { return sigma * fprime(x); }
};

/// Supersonic flow ahead of the shock, sampled on a wall-fitted
/// (x, eta = r / wall_radius(x)) tensor grid.
class UpstreamField {
  public:
    UpstreamField() = default;
    UpstreamField(GasLaw gas, double L1, double L2, double sigma,
                  std::function<double(double)> wallR, int n_x_cells, int nr_cells,
                  bool manufactured);

    double L1() const { return L1_; }
    double L2() const { return L2_; }
    double sigma() const { return sigma_; }
    bool manufactured() const { return manufactured_; }
    const GasLaw& gas() const { return gas_; }
    int nx() const { return static_cast<int>(xs_.size()) - 1; } ///< x cells
    int nr() const { return ux_.n2() - 1; }                     ///< radial cells
    double wall_radius(double x) const { return wallR_(x); }
    const std::vector<double>& x_nodes() const { return xs_; }
    const std::vector<double>& eta_nodes() const { return etas_; }

    Field2D& ux() { return ux_; }
    Field2D& ur() { return ur_; }
    Field2D& ut() { return ut_; }
    Field2D& P() { return P_; }
    const Field2D& ux() const { return ux_; }
    const Field2D& ur() const { return ur_; }
    const Field2D& ut() const { return ut_; }
    const Field2D& P() const { return P_; }

    /// Bilinear interpolation in (x, eta); exact at grid nodes.
    FlowState eval(double x, double r) const;
    /// Cubic (4-point Lagrange) interpolation, used for shock traces where
    /// second-order interpolation error would dominate the iteration.
    FlowState eval_cubic(double x, double r) const;

    /// Mass-coordinate half width: M^2 = int_0^1 s rho u_x(L1, s) ds.
    double mass_half_width() const;

    /// Inverts the slice mass coordinate: the radius r at which
    /// int_0^r s rho u_x(x,s) ds = y2^2.
    double radius_from_mass(double x, double y2) const;

  private:
    FlowState eval_impl(double x, double r, bool cubic) const;

    GasLaw gas_{1.4};
    double L1_ = 0.0, L2_ = 1.0, sigma_ = 0.0;
    std::function<double(double)> wallR_;
    bool manufactured_ = false;
    std::vector<double> xs_, etas_;
    Field2D ux_, ur_, ut_, P_;
};

struct MarchOptions {
    int nx = 128;        ///< requested output resolution in x
    int nr = 64;         ///< radial cells
    int min_total_steps = 2048; ///< lower bound on total marching steps
    double cfl = 0.8;
    double sonic_margin = 1e-4; ///< abort when u_x^2/c^2 - 1 falls below this
};

/// Marches the axisymmetric Euler system from the perturbed inlet data
/// through the perturbed nozzle.  Fourth-order one-step integration in x,
/// centred radial differences with parity ghosts at the axis.
UpstreamField march_supersonic(const GasLaw& gas, const BackgroundSolution& bg,
                               const PerturbationData& data, const MarchOptions& opt = {});

/// Manufactured supersonic field: background plus sigma times the inlet
/// bump shapes, transported rigidly.  Satisfies the compatibility
/// invariants but is NOT an Euler solution (flagged `manufactured`).
UpstreamField analytic_upstream(const GasLaw& gas, const BackgroundSolution& bg,
                                const PerturbationData& data, int nx = 256, int nr = 64);

/// Interpolation accessor used by the shock-trace error terms.
FlowState evaluate_upstream(const UpstreamField& field, double x, double r);

} // namespace axishock
