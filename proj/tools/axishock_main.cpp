// Command-line driver: 1-D background solves, exit-pressure sweeps,
// perturbed 2-D solves, verification of completed runs and grid
// convergence studies.
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "axishock/config.hpp"

namespace {

using axishock::RunConfig;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string grid;
    double sigma = -1.0;
    std::string backend;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
    cmd->add_option("--config", fl.config_path, "configuration JSON file");
    cmd->add_option("--out", fl.out_dir, "output directory");
    cmd->add_option("--grid", fl.grid, "downstream grid as N1xN2");
    cmd->add_option("--sigma", fl.sigma, "perturbation size");
    cmd->add_option("--backend", fl.backend, "elliptic backend: fd | modes")
        ->check(CLI::IsMember({"fd", "modes"}));
}

int apply_common(const CommonFlags& fl, RunConfig& cfg, std::ostream& log) {
    try {
        if (!fl.config_path.empty()) cfg = RunConfig::from_json_file(fl.config_path);
        if (!fl.out_dir.empty()) cfg.out_dir = fl.out_dir;
        if (!fl.grid.empty()) {
            const auto x = fl.grid.find('x');
            if (x == std::string::npos) throw axishock::ConfigError("--grid wants N1xN2");
            cfg.n1 = std::stoi(fl.grid.substr(0, x));
            cfg.n2 = std::stoi(fl.grid.substr(x + 1));
        }
        if (fl.sigma >= 0.0) cfg.sigma = fl.sigma;
        if (!fl.backend.empty()) cfg.backend = fl.backend;
        cfg.validate();
        return 0;
    } catch (const std::exception& e) {
        log << "config: " << e.what() << "\n";
        return 5;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transonic shock solver for axisymmetric duct flow"};
    app.require_subcommand(1);

    CommonFlags f1d, fsw, f2d, fcv;
    std::vector<double> pressures;
    int jobs = 1, levels = 3;
    std::string run_dir;

    CLI::App* c1d = app.add_subcommand("solve-1d", "solve the 1-D background shock");
    add_common(c1d, f1d);

    CLI::App* csw =
        app.add_subcommand("sweep-pressure", "map shock position over exit pressures");
    add_common(csw, fsw);
    csw->add_option("--pressures", pressures, "exit pressures to sweep")->required();
    csw->add_option("--jobs", jobs, "concurrent sweep entries");

    CLI::App* c2d = app.add_subcommand("solve-2d", "solve the perturbed 2-D problem");
    add_common(c2d, f2d);

    CLI::App* cvf = app.add_subcommand("verify", "audit a completed run directory");
    cvf->add_option("dir", run_dir, "run directory")->required();

    CLI::App* ccv = app.add_subcommand("convergence-study", "refinement study");
    add_common(ccv, fcv);
    ccv->add_option("--levels", levels, "number of refinement levels");

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    int rc = 0;
    if (c1d->parsed()) {
        if ((rc = apply_common(f1d, cfg, std::cerr))) return rc;
        return axishock::cmd_solve_1d(cfg, std::cout);
    }
    if (csw->parsed()) {
        if ((rc = apply_common(fsw, cfg, std::cerr))) return rc;
        return axishock::cmd_sweep_pressure(cfg, pressures, jobs, std::cout);
    }
    if (c2d->parsed()) {
        if ((rc = apply_common(f2d, cfg, std::cerr))) return rc;
        return axishock::cmd_solve_2d(cfg, std::cout);
    }
    if (cvf->parsed()) return axishock::cmd_verify(run_dir, std::cout);
    if (ccv->parsed()) {
        if ((rc = apply_common(fcv, cfg, std::cerr))) return rc;
        return axishock::cmd_convergence_study(cfg, levels, std::cout);
    }
    return 0;
}
