#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "viscoflow/config.hpp"
#include "viscoflow/io.hpp"
#include "viscoflow/reparam.hpp"
#include "viscoflow/suites.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace vf;

namespace {

// exit codes
constexpr int kOk = 0, kCheckFailed = 1, kConfigError = 2, kSolverError = 3, kIoError = 4;

// report thresholds for the structure verdicts
constexpr double kTolVar = 1e-6, kTolBV = 1e-3;

struct Failure {
    int code;
    std::string kind;
    std::string message;
};

struct Common {
    std::string config;
    std::string out;
    int workers = 1;
    std::uint64_t seed = kDefaultSeed;
    double tol_scale = 1.0;
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("viscoflow");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("VISCOFLOW_LOG");
    const std::string lvl = env ? env : "info";
    if (lvl == "error")
        spdlog::set_level(spdlog::level::err);
    else if (lvl == "debug")
        spdlog::set_level(spdlog::level::debug);
    else
        spdlog::set_level(spdlog::level::info);
}

RunConfig load(const Common& c) {
    if (c.config.empty()) throw Failure{kConfigError, "config", "--config is required"};
    RunConfig cfg;
    try {
        cfg = load_config(c.config);
    } catch (const std::exception& e) {
        throw Failure{kConfigError, "config", e.what()};
    }
    if (!(c.tol_scale > 0.0)) throw Failure{kConfigError, "config", "--tol-scale must be positive"};
    if (c.workers < 1) throw Failure{kConfigError, "config", "--workers must be >= 1"};
    cfg.solver.tol.tol_eq *= c.tol_scale;
    cfg.solver.tol.tol_rate *= c.tol_scale;
    if (!c.out.empty()) cfg.out_dir = c.out;
    return cfg;
}

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Failure{kIoError, "io", "cannot create output directory '" + dir + "': " + ec.message()};
    return fs::path(dir);
}

void put(const fs::path& p, const std::string& content) {
    try {
        write_file(p.string(), content);
    } catch (const std::exception& e) {
        throw Failure{kIoError, "io", e.what()};
    }
}

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Writes <stem>.csv / <stem>.json as configured; returns the file entries for the manifest.
json write_tables(const fs::path& dir, const std::string& stem, const CurveAnalysis& a, const RunConfig& cfg) {
    json files = json::array();
    for (const auto& f : cfg.formats) {
        const std::string name = stem + "." + f;
        put(dir / name, f == "csv" ? trajectory_csv(a) : trajectory_json(a));
        files.push_back({{"name", name}, {"columns", trajectory_columns()}});
    }
    return files;
}

json structure_json(const StructureReport& r) {
    return {{"s_star", r.s_star},
            {"s_star_index", r.s_star_index},
            {"transient", r.transient},
            {"empty", r.empty},
            {"isolated_members", r.isolated_members},
            {"var_t", r.var_t},
            {"var_z", r.var_z},
            {"transition_residual", r.transition_residual},
            {"bv_residual", r.bv_residual},
            {"verdict_a", r.verdict_a},
            {"verdict_b", r.verdict_b}};
}

json curve_summary(const Problem& P, const ParamTrajectory& traj, const CurveAnalysis& a) {
    const SwitchingReport sw = switching_residuals(a);
    const StructureReport st = structure_detect(P, traj, a, kTolVar, kTolBV);
    double hill = 0.0, chain = 0.0;
    for (const auto& r : a.samples) {
        chain = std::max(chain, r.chain_rule);
        if (r.lambda.regime == Regime::RateIndependent && r.in.p_norm > a.tol.tol_rate)
            hill = std::max(hill, r.hill / r.in.p_norm);
    }
    return {{"params", {{"eps", a.params.eps}, {"mu", a.params.mu}, {"nu", a.params.nu}}},
            {"S", traj.S},
            {"samples", traj.size()},
            {"switching", {{"t_lambda_z", sw.max_t_lz}, {"t_lambda_up", sw.max_t_lup}, {"lambda_up_1m_lambda_z", sw.max_lup_lz}}},
            {"hill_relative", hill},
            {"chain_rule", chain},
            {"m0cr_balance", m0cr_balance_residual(a)},
            {"kinematic_residual", kinematic_residual(P, traj)},
            {"structure", structure_json(st)}};
}

json run_summary(const ViscousRun& run) {
    double gap = 0.0;
    for (std::size_t k = 1; k < run.gaps.size(); ++k) gap = std::max(gap, run.gaps[k]);
    return {{"complete", run.complete},
            {"steps", run.times.size() ? run.times.size() - 1 : 0},
            {"total_residual", num(run.total_residual())},
            {"energy_scale", num(run.energy_scale())},
            {"max_gap", num(gap)}};
}

void write_manifest(const fs::path& dir, const std::string& command, const Common& c, const RunConfig& cfg,
                    const json& files, const json& summary) {
    json m{{"schema", "viscoflow.manifest/1"},
           {"command", command},
           {"seed", c.seed},
           {"tol_scale", c.tol_scale},
           {"material_hash", hex(material_hash(cfg.material))},
           {"config", json::parse(config_to_json(cfg))},
           {"files", files},
           {"summary", summary}};
    put(dir / "manifest.json", m.dump(2) + "\n");
}

int cmd_solve(const Common& c) {
    const RunConfig cfg = load(c);
    const Problem P = build_problem(cfg);
    const State q0 = initial_state(P, cfg);
    spdlog::info("solve: N={} eps={} mu={} nu={}", cfg.solver.opt.N, cfg.params.eps, cfg.params.mu, cfg.params.nu);
    const ViscousRun run = solve(P, q0, cfg.params, cfg.solver.opt);
    if (!run.complete) throw Failure{kSolverError, "solver", run.error};
    const ParamTrajectory traj = reparameterize(P, run, cfg.solver.samples, cfg.solver.time_scale);
    const CurveAnalysis a = analyze_curve(P, traj, cfg.params, cfg.solver.tol);

    const fs::path dir = prepare_out(cfg.out_dir);
    json files = write_tables(dir, "trajectory", a, cfg);
    put(dir / "states.csv", states_csv(run));
    files.push_back({{"name", "states.csv"}, {"columns", "step,t,E_mu,residual,gap,u*,z*,p*"}});
    json summary = curve_summary(P, traj, a);
    summary["run"] = run_summary(run);
    write_manifest(dir, "solve", c, cfg, files, summary);
    spdlog::info("solve: {} knots, S = {:.6g}, residual = {:.3e}", run.times.size(), traj.S, run.total_residual());
    return kOk;
}

int cmd_analyze(const Common& c, const std::string& trajectory) {
    const RunConfig cfg = load(c);
    const Problem P = build_problem(cfg);
    ViscousRun run;
    try {
        run = parse_states_csv(read_file(trajectory), P.space);
    } catch (const std::exception& e) {
        throw Failure{kIoError, "io", e.what()};
    }
    run.params = cfg.params;
    const ParamTrajectory traj = reparameterize(P, run, cfg.solver.samples, cfg.solver.time_scale);
    const CurveAnalysis a = analyze_curve(P, traj, cfg.params, cfg.solver.tol);
    const fs::path dir = prepare_out(cfg.out_dir);
    const json files = write_tables(dir, "analysis", a, cfg);
    json summary = curve_summary(P, traj, a);
    summary["source"] = trajectory;
    put(dir / "report.json", summary.dump(2) + "\n");
    write_manifest(dir, "analyze", c, cfg, files, summary);
    return kOk;
}

json sweep_table(const SweepResult& r) {
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({{"eps", p.params.eps},
                       {"mu", p.params.mu},
                       {"nu", p.params.nu},
                       {"ok", p.ok},
                       {"error", p.error},
                       {"S", num(p.S)},
                       {"cauchy", num(p.cauchy)},
                       {"cr_violation", num(p.cr_violation)},
                       {"cr_balance", num(p.cr_balance)},
                       {"rate_bound", num(p.rate_bound)},
                       {"switching", num(p.switching)},
                       {"viscous_residual", num(p.viscous_residual)}});
    return pts;
}

std::string sweep_csv(const SweepResult& r) {
    std::string s = "eps,mu,nu,ok,S,cauchy,cr_violation,cr_balance,rate_bound,switching,viscous_residual\n";
    for (const auto& p : r.points) {
        for (double v : {p.params.eps, p.params.mu, p.params.nu}) s += fmt_double(v) + ",";
        s += p.ok ? "1" : "0";
        for (double v : {p.S, p.cauchy, p.cr_violation, p.cr_balance, p.rate_bound, p.switching, p.viscous_residual})
            s += "," + fmt_double(v);
        s += "\n";
    }
    return s;
}

struct SweepOutput {
    SweepResult result;
    json summary;
};

SweepOutput run_sweep(const Common& c, const RunConfig& cfg, const Problem& P, const State& q0, SweepPath path,
                      const fs::path& dir, json& files) {
    spdlog::info("sweep {}: {} points, {} worker(s)", to_string(path),
                 sweep_points(path, cfg.sweep.levels, cfg.sweep.eps_final).size(), c.workers);
    SweepResult r = limit_sweep(P, q0, cfg.solver.opt, path, cfg.sweep.levels, cfg.sweep.eps_final, cfg.solver.tol,
                                c.workers, cfg.solver.samples);
    for (const auto& p : r.points)
        if (!p.ok) spdlog::error("sweep {}: point ({}, {}, {}) failed: {}", to_string(path), p.params.eps, p.params.mu,
                                 p.params.nu, p.error);
    const std::string tag = to_string(path);
    put(dir / ("sweep_" + tag + ".csv"), sweep_csv(r));
    files.push_back({{"name", "sweep_" + tag + ".csv"},
                     {"columns", "eps,mu,nu,ok,S,cauchy,cr_violation,cr_balance,rate_bound,switching,viscous_residual"}});
    json summary{{"path", tag}, {"points", sweep_table(r)}};
    if (r.terminal.size() > 0) {
        for (auto& f : write_tables(dir, "terminal_" + tag, r.terminal_analysis, cfg)) files.push_back(f);
        summary["terminal"] = curve_summary(P, r.terminal, r.terminal_analysis);
    } else {
        summary["terminal"] = nullptr;
    }
    return {std::move(r), summary};
}

int cmd_sweep(const Common& c, const std::string& path_override) {
    RunConfig cfg = load(c);
    if (!path_override.empty()) cfg.sweep.path = path_override;
    SweepPath path;
    try {
        path = parse_path(cfg.sweep.path);
    } catch (const std::exception& e) {
        throw Failure{kConfigError, "config", e.what()};
    }
    const Problem P = build_problem(cfg);
    const State q0 = initial_state(P, cfg);
    const fs::path dir = prepare_out(cfg.out_dir);
    json files = json::array();
    SweepOutput out = run_sweep(c, cfg, P, q0, path, dir, files);
    put(dir / ("sweep_" + cfg.sweep.path + ".json"), out.summary.dump(2) + "\n");
    write_manifest(dir, "sweep", c, cfg, files, out.summary);
    if (out.result.terminal.size() == 0) throw Failure{kSolverError, "solver", "no sweep point completed"};
    return kOk;
}

int cmd_commute(const Common& c) {
    const RunConfig cfg = load(c);
    const Problem P = build_problem(cfg);
    const State q0 = initial_state(P, cfg);
    const fs::path dir = prepare_out(cfg.out_dir);
    json files = json::array();
    const SweepPath paths[] = {SweepPath::EpsFirst, SweepPath::EpsNuFirst, SweepPath::Joint};
    std::vector<SweepOutput> outs;
    json report{{"balance_threshold", kTolBV}, {"paths", json::object()}};
    bool all = true;
    for (SweepPath p : paths) {
        outs.push_back(run_sweep(c, cfg, P, q0, p, dir, files));
        const auto& r = outs.back().result;
        const bool done = r.terminal.size() > 0;
        const double bal = done ? m0cr_balance_residual(r.terminal_analysis) : NAN;
        const bool pass = done && bal <= kTolBV;
        all = all && pass;
        report["paths"][to_string(p)] = {{"terminal_params",
                                          done ? json{{"eps", r.terminal_analysis.params.eps},
                                                      {"mu", r.terminal_analysis.params.mu},
                                                      {"nu", r.terminal_analysis.params.nu}}
                                               : json(nullptr)},
                                         {"m0cr_balance", num(bal)},
                                         {"pass", pass},
                                         {"sweep", outs.back().summary}};
    }
    // terminal curves need not coincide; distances are informative
    json dist = json::object();
    for (std::size_t i = 0; i < outs.size(); ++i)
        for (std::size_t j = i + 1; j < outs.size(); ++j) {
            const auto &a = outs[i].result.terminal, &b = outs[j].result.terminal;
            if (a.size() && b.size())
                dist[to_string(paths[i]) + "|" + to_string(paths[j])] = curve_distance(P, a, b);
        }
    report["terminal_distances"] = dist;
    report["commutes"] = all;
    put(dir / "commute.json", report.dump(2) + "\n");
    files.push_back({{"name", "commute.json"}});
    write_manifest(dir, "commute", c, cfg, files, {{"commutes", all}});
    spdlog::info("commute: all paths balanced = {}", all);
    return kOk;
}

// the bundled reference material, used when selftest runs without --config
Material builtin_material() {
    Material m;
    m.gamma1 = 100.0;
    m.gamma2 = 200.0;
    m.c_w = 0.75;
    m.q_exp = 5.0;
    m.r_bar = 30.0;
    m.R_bar = 60.0;
    m.kappa = 0.25;
    m.delta = 1.0;
    m.m_exp = 1.5;
    return m;
}

int cmd_selftest(const Common& c) {
    Material m = builtin_material();
    std::string out = c.out.empty() ? "out" : c.out;
    if (!c.config.empty()) {
        const RunConfig cfg = load(c);
        m = cfg.material;
        out = cfg.out_dir;
    }
    const Problem tiny = tiny_problem(m, 0.5);
    const SuiteResult results[] = {
        constitutive_suite(m, 10000, c.seed),
        gradient_suite(tiny, 100, c.seed, 1e-6),
        step_oracle_suite(m, 20, c.seed, 1e-6),
        fenchel_suite(tiny, 10000, c.seed, 1e-10),
        lsc_sequence_suite(m, 20, c.seed, 1e-6),
    };
    json arr = json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        spdlog::info("{:<14} {} value={:.3e} tol={:.1e} {}", r.name, r.pass ? "PASS" : "FAIL", r.value, r.tol, r.detail);
        arr.push_back({{"name", r.name}, {"pass", r.pass}, {"value", num(r.value)}, {"tol", r.tol}, {"detail", r.detail}});
    }
    const fs::path dir = prepare_out(out);
    put(dir / "selftest.json", json{{"seed", c.seed}, {"suites", arr}, {"pass", all}}.dump(2) + "\n");
    if (!all) throw Failure{kCheckFailed, "check", "selftest suites failed"};
    return kOk;
}

void add_common(CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "run configuration (JSON)");
    if (config_required) opt->required();
    sub->add_option("--out", c.out, "output directory (overrides output.dir)");
    sub->add_option("--workers", c.workers, "worker threads for sweep points")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "seed for randomized suites");
    sub->add_option("--tol-scale", c.tol_scale, "multiplier on the classification tolerances")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"viscoflow: vanishing-viscosity analysis of rate-independent damage and plasticity"};
    app.require_subcommand(1);
    Common c;
    std::string trajectory, path;

    auto* solve_cmd = app.add_subcommand("solve", "viscous solve, reparameterization and single-curve checks");
    add_common(solve_cmd, c, true);
    auto* analyze_cmd = app.add_subcommand("analyze", "single-curve checks on a stored states.csv");
    add_common(analyze_cmd, c, true);
    analyze_cmd->add_option("--trajectory", trajectory, "states.csv written by solve")->required();
    auto* sweep_cmd = app.add_subcommand("sweep", "limit sweep along one path");
    add_common(sweep_cmd, c, true);
    sweep_cmd->add_option("--path", path, "EPS_FIRST | EPSNU_FIRST | JOINT (overrides sweep.path)");
    auto* commute_cmd = app.add_subcommand("commute", "all three sweep paths and the commutation report");
    add_common(commute_cmd, c, true);
    auto* self_cmd = app.add_subcommand("selftest", "oracle-backed property suites on built-in tiny instances");
    add_common(self_cmd, c, false);

    CLI11_PARSE(app, argc, argv);

    try {
        int code = kOk;
        std::string command;
        if (*solve_cmd) command = "solve", code = cmd_solve(c);
        else if (*analyze_cmd) command = "analyze", code = cmd_analyze(c, trajectory);
        else if (*sweep_cmd) command = "sweep", code = cmd_sweep(c, path);
        else if (*commute_cmd) command = "commute", code = cmd_commute(c);
        else if (*self_cmd) command = "selftest", code = cmd_selftest(c);
        std::cout << json{{"status", "ok"}, {"command", command}}.dump() << "\n";
        return code;
    } catch (const Failure& f) {
        std::cout << json{{"status", "error"}, {"kind", f.kind}, {"message", f.message}, {"exit_code", f.code}}.dump()
                  << "\n";
        spdlog::error("{}", f.message);
        return f.code;
    } catch (const std::invalid_argument& e) {
        std::cout << json{{"status", "error"}, {"kind", "config"}, {"message", e.what()}, {"exit_code", kConfigError}}.dump()
                  << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cout << json{{"status", "error"}, {"kind", "solver"}, {"message", e.what()}, {"exit_code", kSolverError}}.dump()
                  << "\n";
        return kSolverError;
    }
}
