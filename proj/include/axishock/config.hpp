#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "axishock/background.hpp"
#include "axishock/errors.hpp"
#include "axishock/solver.hpp"
#include "axishock/upstream.hpp"
#include "axishock/verify.hpp"

namespace axishock {

/// Raised on malformed configuration or run-directory contents.
struct ConfigError : SolverError {
    using SolverError::SolverError;
};

/// Full description of a run: gas, duct geometry, external force,
/// background selection, perturbation, grids, solver knobs and the
/// verification thresholds.  Serializable to/from JSON so that every run
/// directory carries an exact copy of its inputs.
struct RunConfig {
    // gas + geometry
    double gamma = 1.4;
    double L1 = 0.0, L2 = 2.0;

    // external force profile
    std::string force_type = "constant"; ///< constant | linear | tabulated
    double g0 = 0.5, g1 = 0.5;
    std::vector<double> force_x, force_g;

    // background selection: either an explicit exit pressure or a target
    // shock position (used when exit_pressure <= 0).
    double inlet_rho = 1.0, inlet_u = 2.0, inlet_P = 1.0;
    double exit_pressure = -1.0;
    double shock_position = 1.0;

    // perturbation
    double sigma = 0.0;
    PerturbationAmplitudes amplitudes;

    // grids
    int n1 = 128, n2 = 64;
    int upstream_nx = 256, upstream_nr = 64;

    // solver knobs
    double tol = 1e-10;
    int max_iter = 40;
    std::string backend = "fd"; ///< fd | modes
    int n_modes = 0;

    // verification thresholds: caps on ResidualReport keys checked by the
    // verify command (entropy and regime margins are always required > 0).
    std::map<std::string, double> thresholds;

    std::string out_dir = "out";

    /// Throws ConfigError unless all tolerances are positive, all grid
    /// sizes are >= 16 and sigma >= 0.
    void validate() const;

    ForceProfile make_force() const;
    State1D make_inlet() const;
    BackgroundSolution make_background() const;
    PerturbationData make_perturbation() const;
    MarchOptions make_march_options() const;
    SolverOptions make_solver_options() const;

    /// Residual caps used when the config supplies none.
    static std::map<std::string, double> default_thresholds();

    std::string to_json() const;
    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_json_file(const std::string& path);
};

/// Writes rows as CSV with a header line; floats carry 17 significant
/// digits so a round trip is bit-stable.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// Reads a CSV produced by write_csv; checks the header.
std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::vector<std::string>& columns);

/// FNV-1a 64-bit digest of a file, hex-encoded; manifest fingerprinting.
std::string file_digest(const std::string& path);

/// Writes manifest.json (config echo + digest of every artifact listed).
void write_manifest(const std::string& dir, const RunConfig& cfg,
                    const std::vector<std::string>& artifacts);

// Subcommands.  Each returns a process exit code: 0 success,
// 2 admissibility failure, 3 iteration divergence, 4 verification
// failure, 5 IO error.
int cmd_solve_1d(const RunConfig& cfg, std::ostream& log);
int cmd_sweep_pressure(const RunConfig& cfg, std::vector<double> pressures, int jobs,
                       std::ostream& log);
int cmd_solve_2d(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const std::string& run_dir, std::ostream& log);
int cmd_convergence_study(const RunConfig& cfg, int levels, std::ostream& log);

/// Rebuilds PhysicalFields from a completed run directory (fields.csv,
/// upstream.csv, shock.csv + manifest config).  Throws ConfigError when a
/// file is missing or malformed.
PhysicalFields load_run_fields(const std::string& run_dir);

} // namespace axishock
