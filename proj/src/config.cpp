#include "axishock/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "axishock/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace axishock {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename J, typename T>
void get_if(const J& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).template get<T>();
}

} // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (!(gamma > 1.0)) fail("gamma must exceed 1");
    if (!(L2 > L1)) fail("L2 must exceed L1");
    if (!(tol > 0.0)) fail("tol must be positive");
    if (max_iter < 1) fail("max_iter must be at least 1");
    if (n1 < 16 || n2 < 16) fail("grid sizes must be at least 16");
    if (upstream_nx < 16 || upstream_nr < 16) fail("upstream grid sizes must be at least 16");
    if (sigma < 0.0) fail("sigma must be nonnegative");
    if (!(inlet_rho > 0.0 && inlet_P > 0.0 && inlet_u > 0.0))
        fail("inlet state must be positive with inflow velocity");
    if (backend != "fd" && backend != "modes") fail("backend must be fd or modes");
    if (force_type != "constant" && force_type != "linear" && force_type != "tabulated")
        fail("force type must be constant, linear or tabulated");
    if (force_type == "tabulated" &&
        (force_x.size() < 2 || force_x.size() != force_g.size()))
        fail("tabulated force needs matching x/g arrays with at least two nodes");
    for (const auto& [key, cap] : thresholds)
        if (!(cap > 0.0)) fail("threshold " + key + " must be positive");
}

ForceProfile RunConfig::make_force() const {
    if (force_type == "constant") return ForceProfile::constant(g0, L1);
    if (force_type == "linear") return ForceProfile::linear(g0, g1, L1, L2);
    return ForceProfile::tabulated(force_x, force_g);
}

State1D RunConfig::make_inlet() const { return State1D{inlet_rho, inlet_u, inlet_P}; }

BackgroundSolution RunConfig::make_background() const {
    GasLaw gas(gamma);
    ForceProfile force = make_force();
    State1D inlet = make_inlet();
    double Pe = exit_pressure;
    if (Pe <= 0.0) {
        Branch1D sup = integrate_branch(gas, inlet, L1, L2, force, 2048);
        Pe = exit_pressure_of_shock_position(gas, sup, shock_position, L2, force, {});
    }
    return solve_background(gas, Pe, inlet, force, L1, L2, {});
}

PerturbationData RunConfig::make_perturbation() const {
    return sigma == 0.0 ? PerturbationData::none(L1, L2)
                        : PerturbationData::builtin(sigma, L1, L2, amplitudes);
}

MarchOptions RunConfig::make_march_options() const {
    MarchOptions mo;
    mo.nx = upstream_nx;
    mo.nr = upstream_nr;
    return mo;
}

SolverOptions RunConfig::make_solver_options() const {
    SolverOptions so;
    so.n1 = n1;
    so.n2 = n2;
    so.tol = tol;
    so.max_iter = max_iter;
    so.backend = backend == "fd" ? EllipticBackend::FD : EllipticBackend::Modes;
    so.n_modes = n_modes;
    return so;
}

std::map<std::string, double> RunConfig::default_thresholds() {
    // Caps sized for the reference configuration at 128x64 and sigma up to
    // 0.005 with roughly a factor-three margin over measured values.
    return {
        {"euler_mass", 2e-2},  {"euler_mom_x", 1e-3},  {"euler_mom_r", 3e-2},
        {"euler_swirl", 1e-4}, {"euler_upstream", 1e-3},
        {"rh_1", 2e-3},        {"rh_2", 2e-3},         {"rh_3", 4e-2},
        {"rh_4", 1e-4},
        {"compat_ur", 1e-6},   {"compat_ut", 1e-6},    {"compat_dux", 1e-2},
        {"compat_dP", 1e-2},   {"compat_d2ur", 1e-1},  {"compat_dut", 1e-2},
    };
}

std::string RunConfig::to_json() const {
    ordered_json j;
    j["gas"] = {{"gamma", gamma}};
    j["geometry"] = {{"L1", L1}, {"L2", L2}};
    ordered_json jf = {{"type", force_type}, {"g0", g0}, {"g1", g1}};
    if (force_type == "tabulated") {
        jf["x"] = force_x;
        jf["g"] = force_g;
    }
    j["force"] = jf;
    j["background"] = {{"inlet_rho", inlet_rho}, {"inlet_u", inlet_u},
                       {"inlet_P", inlet_P},     {"exit_pressure", exit_pressure},
                       {"shock_position", shock_position}};
    j["perturbation"] = {{"sigma", sigma},
                         {"amplitudes",
                          {{"wall", amplitudes.wall},
                           {"force", amplitudes.force},
                           {"u", amplitudes.u},
                           {"v", amplitudes.v},
                           {"w", amplitudes.w},
                           {"P", amplitudes.P},
                           {"exit", amplitudes.exit}}}};
    j["grid"] = {{"n1", n1}, {"n2", n2}, {"upstream_nx", upstream_nx},
                 {"upstream_nr", upstream_nr}};
    j["solver"] = {{"tol", tol}, {"max_iter", max_iter}, {"backend", backend},
                   {"n_modes", n_modes}};
    j["thresholds"] = thresholds;
    j["output"] = {{"dir", out_dir}};
    return j.dump(2);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        if (j.contains("gas")) get_if(j["gas"], "gamma", c.gamma);
        if (j.contains("geometry")) {
            get_if(j["geometry"], "L1", c.L1);
            get_if(j["geometry"], "L2", c.L2);
        }
        if (j.contains("force")) {
            get_if(j["force"], "type", c.force_type);
            get_if(j["force"], "g0", c.g0);
            get_if(j["force"], "g1", c.g1);
            get_if(j["force"], "x", c.force_x);
            get_if(j["force"], "g", c.force_g);
        }
        if (j.contains("background")) {
            const auto& b = j["background"];
            get_if(b, "inlet_rho", c.inlet_rho);
            get_if(b, "inlet_u", c.inlet_u);
            get_if(b, "inlet_P", c.inlet_P);
            get_if(b, "exit_pressure", c.exit_pressure);
            get_if(b, "shock_position", c.shock_position);
        }
        if (j.contains("perturbation")) {
            const auto& p = j["perturbation"];
            get_if(p, "sigma", c.sigma);
            if (p.contains("amplitudes")) {
                const auto& a = p["amplitudes"];
                get_if(a, "wall", c.amplitudes.wall);
                get_if(a, "force", c.amplitudes.force);
                get_if(a, "u", c.amplitudes.u);
                get_if(a, "v", c.amplitudes.v);
                get_if(a, "w", c.amplitudes.w);
                get_if(a, "P", c.amplitudes.P);
                get_if(a, "exit", c.amplitudes.exit);
            }
        }
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            get_if(g, "n1", c.n1);
            get_if(g, "n2", c.n2);
            get_if(g, "upstream_nx", c.upstream_nx);
            get_if(g, "upstream_nr", c.upstream_nr);
        }
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            get_if(s, "tol", c.tol);
            get_if(s, "max_iter", c.max_iter);
            get_if(s, "backend", c.backend);
            get_if(s, "n_modes", c.n_modes);
        }
        if (j.contains("thresholds"))
            c.thresholds = j["thresholds"].get<std::map<std::string, double>>();
        if (j.contains("output")) get_if(j["output"], "dir", c.out_dir);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: bad field type: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("io: cannot write " + path);
    for (size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw ConfigError("io: row width mismatch writing " + path);
        for (size_t c = 0; c < row.size(); ++c)
            out << fmt17(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
    if (!out) throw ConfigError("io: short write to " + path);
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw ConfigError("io: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("io: empty file " + path);
    {
        std::string expect;
        for (size_t c = 0; c < columns.size(); ++c)
            expect += columns[c] + (c + 1 < columns.size() ? "," : "");
        if (line != expect)
            throw ConfigError("io: header mismatch in " + path + " (got '" + line + "')");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            // strtod instead of stod: subnormal values parse without the
            // out_of_range that stod raises on ERANGE.
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw ConfigError("io: bad number '" + cell + "' in " + path);
            row.push_back(v);
        }
        if (row.size() != columns.size())
            throw ConfigError("io: row width mismatch reading " + path);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("io: cannot open " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void write_manifest(const std::string& dir, const RunConfig& cfg,
                    const std::vector<std::string>& artifacts) {
    ordered_json m;
    m["config"] = ordered_json::parse(cfg.to_json());
    ordered_json files = ordered_json::object();
    for (const auto& name : artifacts)
        files[name] = file_digest((fs::path(dir) / name).string());
    m["artifacts"] = files;
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw ConfigError("io: cannot write manifest in " + dir);
    out << m.dump(2) << "\n";
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("io: cannot create directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("io: cannot write " + path);
    out << text << "\n";
}

ordered_json report_json(const ResidualReport& rep) {
    return ordered_json::parse(rep.to_json());
}

/// Evaluates a report against caps; returns the failing key list.
std::vector<std::string> failing_checks(const ResidualReport& rep,
                                        const std::map<std::string, double>& caps) {
    const ordered_json j = report_json(rep);
    std::vector<std::string> bad;
    for (const auto& [key, cap] : caps) {
        if (!j.contains(key)) {
            bad.push_back(key + " (unknown key)");
            continue;
        }
        const double v = j.at(key).get<double>();
        if (!(std::abs(v) <= cap)) bad.push_back(key);
    }
    if (!(rep.entropy_min > 0.0)) bad.push_back("entropy_min");
    if (!(rep.subsonic_margin > 0.0)) bad.push_back("subsonic_margin");
    if (!(rep.supersonic_margin > 0.0)) bad.push_back("supersonic_margin");
    return bad;
}

} // namespace

int cmd_solve_1d(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        ensure_dir(cfg.out_dir);
        BackgroundSolution bg = cfg.make_background();

        const int ns = 256;
        std::vector<std::vector<double>> rows;
        for (int i = 0; i <= ns; ++i) {
            const double x = cfg.L1 + (cfg.L2 - cfg.L1) * i / ns;
            const State1D s = bg.sup(x);
            rows.push_back({x, 0.0, s.rho, s.u, s.P});
        }
        for (int i = 0; i <= ns; ++i) {
            const double x = bg.Lb + (cfg.L2 - bg.Lb) * i / ns;
            const State1D s = bg.sub(x);
            rows.push_back({x, 1.0, s.rho, s.u, s.P});
        }
        write_csv((fs::path(cfg.out_dir) / "background.csv").string(),
                  {"x", "branch", "rho", "u", "P"}, rows);

        ordered_json sum;
        sum["Lb"] = bg.Lb;
        sum["P1"] = bg.P_bracket_lo;
        sum["P2"] = bg.P_bracket_hi;
        sum["mass_flux"] = bg.mass_flux;
        sum["exit_pressure"] = bg.exit_pressure;
        sum["entropy_jump"] = bg.entropy_jump();
        write_text((fs::path(cfg.out_dir) / "summary.json").string(), sum.dump(2));
        write_manifest(cfg.out_dir, cfg, {"background.csv", "summary.json"});
        log << "solve-1d: Lb = " << bg.Lb << ", bracket (" << bg.P_bracket_lo << ", "
            << bg.P_bracket_hi << ")\n";
        return 0;
    } catch (const AdmissibilityError& e) {
        log << "solve-1d: inadmissible exit pressure; bracket (" << e.P1 << ", " << e.P2
            << "): " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        log << "solve-1d: " << e.what() << "\n";
        return 5;
    }
}

int cmd_sweep_pressure(const RunConfig& cfg, std::vector<double> pressures, int jobs,
                       std::ostream& log) {
    try {
        cfg.validate();
        ensure_dir(cfg.out_dir);
        if (pressures.empty()) throw ConfigError("sweep: no pressures given");
        std::sort(pressures.begin(), pressures.end());

        auto solve_one = [&cfg](double pe) -> std::pair<bool, double> {
            RunConfig c = cfg;
            c.exit_pressure = pe;
            try {
                return {true, c.make_background().Lb};
            } catch (const AdmissibilityError&) {
                return {false, 0.0};
            }
        };

        std::vector<std::pair<bool, double>> results(pressures.size());
        if (jobs > 1) {
            std::vector<std::future<std::pair<bool, double>>> futs;
            for (double pe : pressures)
                futs.push_back(std::async(std::launch::async, solve_one, pe));
            for (size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
        } else {
            for (size_t i = 0; i < pressures.size(); ++i)
                results[i] = solve_one(pressures[i]);
        }

        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < pressures.size(); ++i) {
            if (!results[i].first) {
                log << "sweep: skipping out-of-bracket pressure " << pressures[i] << "\n";
                continue;
            }
            rows.push_back({pressures[i], results[i].second});
            log << "sweep: P_e = " << pressures[i] << " -> Lb = " << results[i].second
                << "\n";
        }
        if (rows.empty()) {
            log << "sweep: no admissible pressures\n";
            return 2;
        }
        for (size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i][1] < rows[i - 1][1]))
                log << "sweep: warning: Lb not strictly decreasing at P_e = " << rows[i][0]
                    << "\n";
        write_csv((fs::path(cfg.out_dir) / "sweep.csv").string(), {"P_e", "Lb"}, rows);
        write_manifest(cfg.out_dir, cfg, {"sweep.csv"});
        return 0;
    } catch (const ConfigError& e) {
        log << "sweep: " << e.what() << "\n";
        return 5;
    }
}

namespace {

void write_solution_artifacts(const std::string& dir, const PhysicalFields& f,
                              const SubsonicSolution& sol) {
    const int n1 = f.X.n1() - 1, n2 = f.X.n2() - 1;
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<size_t>(n1 + 1) * (n2 + 1));
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j)
            rows.push_back({double(i), double(j), f.z1[i], f.z2[j], f.X(i, j), f.R(i, j),
                            f.ux(i, j), f.ur(i, j), f.ut(i, j), f.rho(i, j), f.P(i, j)});
    write_csv((fs::path(dir) / "fields.csv").string(),
              {"i", "j", "z1", "z2", "x", "r", "ux", "ur", "ut", "rho", "P"}, rows);

    rows.clear();
    const int mx = static_cast<int>(f.up_x.size()) - 1;
    const int mr = static_cast<int>(f.up_eta.size()) - 1;
    for (int i = 0; i <= mx; ++i)
        for (int j = 0; j <= mr; ++j)
            rows.push_back({double(i), double(j), f.up_x[i], f.up_eta[j], f.up_wallR[i],
                            f.up_ux(i, j), f.up_ur(i, j), f.up_ut(i, j), f.up_rho(i, j),
                            f.up_P(i, j)});
    write_csv((fs::path(dir) / "upstream.csv").string(),
              {"i", "j", "x", "eta", "wallR", "ux", "ur", "ut", "rho", "P"}, rows);

    rows.clear();
    for (int j = 0; j <= n2; ++j)
        rows.push_back({double(j), f.z2[j], f.shock_r[j], f.shock_x[j]});
    write_csv((fs::path(dir) / "shock.csv").string(), {"j", "z2", "r", "x"}, rows);

    ordered_json it = ordered_json::array();
    for (const auto& rec : sol.history)
        it.push_back({{"iter", rec.iter},
                      {"norm", rec.norm},
                      {"delta", rec.delta},
                      {"ratio", rec.ratio},
                      {"Lambda", rec.report.Lambda},
                      {"elliptic_residual", rec.report.elliptic_residual},
                      {"slope_mismatch", rec.report.slope_mismatch}});
    ordered_json jlog;
    jlog["converged"] = sol.converged;
    jlog["iterations"] = sol.iterations;
    jlog["final_delta"] = sol.final_delta;
    jlog["history"] = it;
    write_text((fs::path(dir) / "iterations.json").string(), jlog.dump(2));
}

} // namespace

int cmd_solve_2d(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        ensure_dir(cfg.out_dir);
        BackgroundSolution bg = cfg.make_background();
        PerturbationData pert = cfg.make_perturbation();
        UpstreamField up = march_supersonic(bg.gas, bg, pert, cfg.make_march_options());
        SubsonicSolution sol = solve_subsonic(bg, up, pert, cfg.make_solver_options());
        if (!sol.converged) {
            log << "solve-2d: no convergence within " << cfg.max_iter
                << " iterations (final delta " << sol.final_delta << ")\n";
            return 3;
        }
        PhysicalFields f = assemble_physical_solution(sol);
        write_solution_artifacts(cfg.out_dir, f, sol);
        ResidualReport rep = verify_all(f);
        write_text((fs::path(cfg.out_dir) / "verify.json").string(), rep.to_json());
        write_manifest(cfg.out_dir, cfg,
                       {"fields.csv", "upstream.csv", "shock.csv", "iterations.json",
                        "verify.json"});
        log << "solve-2d: converged in " << sol.iterations << " iterations, final delta "
            << sol.final_delta << "\n";
        return 0;
    } catch (const AdmissibilityError& e) {
        log << "solve-2d: inadmissible exit pressure; bracket (" << e.P1 << ", " << e.P2
            << ")\n";
        return 2;
    } catch (const DivergenceError& e) {
        log << "solve-2d: " << e.what() << "\n  contraction history:";
        for (double r : e.ratio_history) log << " " << r;
        log << "\n";
        return 3;
    } catch (const ConfigError& e) {
        log << "solve-2d: " << e.what() << "\n";
        return 5;
    }
}

PhysicalFields load_run_fields(const std::string& run_dir) {
    const fs::path dir(run_dir);
    std::ifstream min(dir / "manifest.json");
    if (!min) throw ConfigError("verify: missing manifest.json in " + run_dir);
    std::stringstream ss;
    ss << min.rdbuf();
    ordered_json m;
    try {
        m = ordered_json::parse(ss.str());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("verify: bad manifest: ") + e.what());
    }
    if (!m.contains("config")) throw ConfigError("verify: manifest lacks config echo");
    RunConfig cfg = RunConfig::from_json_text(m["config"].dump());

    auto rows = read_csv((dir / "fields.csv").string(),
                         {"i", "j", "z1", "z2", "x", "r", "ux", "ur", "ut", "rho", "P"});
    int n1 = 0, n2 = 0;
    for (const auto& r : rows) {
        n1 = std::max(n1, static_cast<int>(r[0]));
        n2 = std::max(n2, static_cast<int>(r[1]));
    }
    PhysicalFields f;
    f.gamma = cfg.gamma;
    f.z1.resize(n1 + 1);
    f.z2.resize(n2 + 1);
    f.X = Field2D(n1 + 1, n2 + 1);
    f.R = f.X;
    f.ux = f.X;
    f.ur = f.X;
    f.ut = f.X;
    f.rho = f.X;
    f.P = f.X;
    for (const auto& r : rows) {
        const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
        f.z1[i] = r[2];
        f.z2[j] = r[3];
        f.X(i, j) = r[4];
        f.R(i, j) = r[5];
        f.ux(i, j) = r[6];
        f.ur(i, j) = r[7];
        f.ut(i, j) = r[8];
        f.rho(i, j) = r[9];
        f.P(i, j) = r[10];
    }

    rows = read_csv((dir / "upstream.csv").string(),
                    {"i", "j", "x", "eta", "wallR", "ux", "ur", "ut", "rho", "P"});
    int mx = 0, mr = 0;
    for (const auto& r : rows) {
        mx = std::max(mx, static_cast<int>(r[0]));
        mr = std::max(mr, static_cast<int>(r[1]));
    }
    f.up_x.resize(mx + 1);
    f.up_eta.resize(mr + 1);
    f.up_wallR.resize(mx + 1);
    f.up_ux = Field2D(mx + 1, mr + 1);
    f.up_ur = f.up_ux;
    f.up_ut = f.up_ux;
    f.up_rho = f.up_ux;
    f.up_P = f.up_ux;
    for (const auto& r : rows) {
        const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
        f.up_x[i] = r[2];
        f.up_eta[j] = r[3];
        f.up_wallR[i] = r[4];
        f.up_ux(i, j) = r[5];
        f.up_ur(i, j) = r[6];
        f.up_ut(i, j) = r[7];
        f.up_rho(i, j) = r[8];
        f.up_P(i, j) = r[9];
    }

    rows = read_csv((dir / "shock.csv").string(), {"j", "z2", "r", "x"});
    f.shock_x.resize(n2 + 1);
    f.shock_r.resize(n2 + 1);
    for (const auto& r : rows) {
        const int j = static_cast<int>(r[0]);
        if (j < 0 || j > n2) throw ConfigError("verify: shock.csv index out of range");
        f.shock_r[j] = r[2];
        f.shock_x[j] = r[3];
    }

    ForceProfile force = cfg.make_force();
    PerturbationData pert = cfg.make_perturbation();
    f.force_g = force.g;
    const double sig = pert.sigma;
    f.dPhi_x = [sig, fn = pert.dPhi_e_dx](double x, double r) { return sig * fn(x, r); };
    f.dPhi_r = [sig, fn = pert.dPhi_e_dr](double x, double r) { return sig * fn(x, r); };
    return f;
}

int cmd_verify(const std::string& run_dir, std::ostream& log) {
    try {
        PhysicalFields f = load_run_fields(run_dir);
        std::ifstream min(fs::path(run_dir) / "manifest.json");
        std::stringstream ss;
        ss << min.rdbuf();
        RunConfig cfg = RunConfig::from_json_text(
            ordered_json::parse(ss.str())["config"].dump());
        std::map<std::string, double> caps =
            cfg.thresholds.empty() ? RunConfig::default_thresholds() : cfg.thresholds;

        ResidualReport rep = verify_all(f);
        std::vector<std::string> bad = failing_checks(rep, caps);

        ordered_json out;
        out["report"] = report_json(rep);
        ordered_json caps_j = ordered_json::object();
        for (const auto& [k, v] : caps) caps_j[k] = v;
        out["thresholds"] = caps_j;
        out["failed"] = bad;
        write_text((fs::path(run_dir) / "verify.json").string(), out.dump(2));

        if (bad.empty()) {
            log << "verify: all checks pass\n";
            return 0;
        }
        log << "verify: failing checks:";
        for (const auto& k : bad) log << " " << k;
        log << "\n";
        return 4;
    } catch (const ConfigError& e) {
        log << "verify: " << e.what() << "\n";
        return 5;
    }
}

int cmd_convergence_study(const RunConfig& cfg, int levels, std::ostream& log) {
    try {
        cfg.validate();
        if (levels < 2) throw ConfigError("convergence-study: need at least 2 levels");
        ensure_dir(cfg.out_dir);
        BackgroundSolution bg = cfg.make_background();
        PerturbationData pert = cfg.make_perturbation();

        const std::vector<std::string> keys = {
            "euler_mass", "euler_mom_x", "euler_mom_r",   "euler_mass_l2",
            "euler_mom_x_l2", "euler_mom_r_l2", "rh_1", "rh_2", "rh_3"};
        std::vector<std::vector<double>> rows;
        std::vector<ordered_json> reports;
        for (int lev = 0; lev < levels; ++lev) {
            const int scale = 1 << lev;
            RunConfig c = cfg;
            c.n1 = cfg.n1 * scale;
            c.n2 = cfg.n2 * scale;
            // Refine the upstream march jointly so trace interpolation does
            // not cap the observed order.
            c.upstream_nx = std::max(cfg.upstream_nx, 2 * c.n1);
            c.upstream_nr = std::max(cfg.upstream_nr, c.n2);
            UpstreamField up = march_supersonic(bg.gas, bg, pert, c.make_march_options());
            SubsonicSolution sol = solve_subsonic(bg, up, pert, c.make_solver_options());
            if (!sol.converged) {
                log << "convergence-study: level " << lev << " did not converge\n";
                return 3;
            }
            ResidualReport rep = verify_all(assemble_physical_solution(sol));
            const ordered_json jr = report_json(rep);
            reports.push_back(jr);
            std::vector<double> row = {double(c.n1), double(c.n2), rep.h};
            for (const auto& k : keys) row.push_back(jr.at(k).get<double>());
            rows.push_back(std::move(row));
            log << "convergence-study: level " << lev << " (" << c.n1 << "x" << c.n2
                << ") done\n";
        }
        std::vector<std::string> cols = {"n1", "n2", "h"};
        cols.insert(cols.end(), keys.begin(), keys.end());
        write_csv((fs::path(cfg.out_dir) / "convergence.csv").string(), cols, rows);
        for (int lev = 1; lev < levels; ++lev) {
            log << "  ratios level " << lev - 1 << " -> " << lev << ":";
            for (const auto& k : keys) {
                const double a = reports[lev - 1].at(k).get<double>();
                const double b = reports[lev].at(k).get<double>();
                log << " " << k << "=" << (b != 0.0 ? a / b : 0.0);
            }
            log << "\n";
        }
        write_manifest(cfg.out_dir, cfg, {"convergence.csv"});
        return 0;
    } catch (const AdmissibilityError& e) {
        log << "convergence-study: inadmissible exit pressure; bracket (" << e.P1 << ", "
            << e.P2 << ")\n";
        return 2;
    } catch (const DivergenceError& e) {
        log << "convergence-study: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        log << "convergence-study: " << e.what() << "\n";
        return 5;
    }
}

} // namespace axishock
