// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "viscoflow/bv_analysis.hpp"
#include "viscoflow/config.hpp"
#include "viscoflow/io.hpp"
#include "viscoflow/suites.hpp"

using namespace vf;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kGradTol = 1e-6;
constexpr double kGradSeconds = 10.0;
constexpr int kGradSamples = 100;
constexpr int kConstitutiveSamples = 10000;
constexpr double kStepTol = 1e-6;
constexpr int kOracleSteps = 20;
constexpr double kOracleSeconds = 60.0;
constexpr double kBalanceRel = 1e-3;
constexpr double kRatioLo = 1.5, kRatioHi = 3.0;
constexpr int kFenchelSamples = 10000;
constexpr double kFenchelNeg = 1e-10;
constexpr double kGapTol = 1e-8;
constexpr double kRescaleTol = 1e-4;
constexpr double kSwitchTol = 1e-3;
constexpr double kVarTol = 1e-6;
constexpr double kBVTol = 1e-3;
constexpr double kCommuteBalance = 1e-3;
constexpr double kCommuteSeconds = 600.0;
constexpr double kHillTol = 1e-6;
constexpr double kLscTol = 1e-6;
constexpr int kLscLevels = 20;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d %-26s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cfg_path(const char* name) { return std::string(VF_SOURCE_DIR) + "/configs/" + name; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + VF_CLI + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

struct Sweep {
    Problem P;
    SweepResult res;
};

Sweep joint_sweep(const RunConfig& cfg) {
    Sweep s{build_problem(cfg), {}};
    s.res = limit_sweep(s.P, initial_state(s.P, cfg), cfg.solver.opt, SweepPath::Joint, cfg.sweep.levels,
                        cfg.sweep.eps_final, cfg.solver.tol, 1, cfg.solver.samples);
    return s;
}

bool sweep_ok(const SweepResult& r) {
    for (const auto& p : r.points)
        if (!p.ok) return false;
    return !r.points.empty();
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "viscoflow_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const RunConfig ref = load_config(cfg_path("reference.json"));
    const RunConfig unstable = load_config(cfg_path("unstable.json"));
    const Problem P = build_problem(ref);
    const State q0 = initial_state(P, ref);

    {
        const auto t0 = std::chrono::steady_clock::now();
        const SuiteResult r = gradient_suite(P, kGradSamples, kDefaultSeed, kGradTol);
        const double sec = seconds_since(t0);
        report(1, "gradients", r.pass && sec < kGradSeconds,
               fmt("max rel err %.3e (tol %.0e), %.2f s", r.value, kGradTol, sec));
    }
    {
        const SuiteResult r = constitutive_suite(ref.material, kConstitutiveSamples, kDefaultSeed);
        report(2, "constitutive", r.pass, fmt("%g failures in 1e4 samples per hypothesis", r.value) + " " + r.detail);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const SuiteResult r = step_oracle_suite(ref.material, kOracleSteps, kDefaultSeed, kStepTol);
        const double sec = seconds_since(t0);
        report(3, "step-oracle", r.pass && sec < kOracleSeconds,
               fmt("max state diff %.3e (tol %.0e), %.2f s", r.value, kStepTol, sec));
    }

    const ViscousRun run = solve(P, q0, ref.params, ref.solver.opt);
    {
        SolverOptions o2 = ref.solver.opt;
        o2.N *= 2;
        const ViscousRun run2 = solve(P, q0, ref.params, o2);
        bool pass = run.complete && run2.complete;
        double rel = 0.0, ratio = 0.0;
        if (pass) {
            rel = run.total_residual() / run.energy_scale();
            ratio = run.total_residual() / run2.total_residual();
            pass = rel <= kBalanceRel && ratio >= kRatioLo && ratio <= kRatioHi;
        }
        report(4, "viscous balance", pass, fmt("residual/scale %.3e at N=200, ratio N=200/400 %.3f", rel, ratio));
    }
    {
        const SuiteResult r = fenchel_suite(P, kFenchelSamples, kDefaultSeed, kFenchelNeg);
        double gap = run.complete ? 0.0 : 1.0;
        for (std::size_t k = 1; k < run.gaps.size(); ++k) gap = std::max(gap, run.gaps[k]);
        report(5, "Fenchel-Young", r.pass && gap <= kGapTol,
               fmt("min random gap %.3e, max converged-step gap %.3e; ", r.value, gap) + r.detail);
    }
    {
        RunConfig c2 = ref;
        c2.loading.speed *= 2.0;
        c2.loading.T *= 0.5;
        const Problem P2 = build_problem(c2);
        const ViscousRun r2 = solve(P2, initial_state(P2, c2), c2.params, c2.solver.opt);
        bool pass = run.complete && r2.complete;
        double d = 0.0;
        if (pass) {
            const ParamTrajectory a = reparameterize(P, run, ref.solver.samples, 1.0);
            const ParamTrajectory b = reparameterize(P2, r2, ref.solver.samples, 2.0);
            d = curve_distance(P, a, b);
            pass = d <= kRescaleTol;
        }
        report(6, "rescaling invariance", pass, fmt("sup distance %.3e at eps=%.0e", d, ref.params.eps));
    }

    const Sweep js = joint_sweep(ref);
    {
        bool pass = sweep_ok(js.res);
        std::string detail;
        if (pass) {
            const SwitchingReport sw = switching_residuals(js.res.terminal_analysis);
            const double worst = std::max({sw.max_t_lz, sw.max_t_lup, sw.max_lup_lz});
            bool decreasing = true;
            for (std::size_t k = 1; k < js.res.points.size(); ++k)
                decreasing = decreasing && js.res.points[k].switching < js.res.points[k - 1].switching;
            pass = worst <= kSwitchTol && decreasing;
            detail = fmt("t'l_z %.3e, t'l_up %.3e, l_up(1-l_z) %.3e", sw.max_t_lz, sw.max_t_lup, sw.max_lup_lz) +
                     "; along grid:";
            for (const auto& p : js.res.points) detail += fmt(" %.2e", p.switching);
        } else {
            detail = "sweep failed";
        }
        report(7, "switching conditions", pass, detail);
    }
    {
        const Sweep us = joint_sweep(unstable);
        bool pass = sweep_ok(us.res);
        std::string detail = "sweep failed";
        if (pass) {
            const StructureReport st = structure_detect(us.P, us.res.terminal, us.res.terminal_analysis, kVarTol, kBVTol);
            pass = st.transient && st.s_star > 0.0 && st.var_z <= kVarTol && st.var_t <= kVarTol;
            detail = fmt("s*=%.4f var_z %.2e var_t %.2e transition %.2e", st.s_star, st.var_z, st.var_t,
                         st.transition_residual);
        }
        report(8, "structure (a) unstable", pass, detail);
    }
    {
        bool pass = sweep_ok(js.res);
        std::string detail = "sweep failed";
        if (pass) {
            const StructureReport st = structure_detect(js.P, js.res.terminal, js.res.terminal_analysis, kVarTol, kBVTol);
            pass = !st.transient && st.s_star == 0.0 && st.bv_residual <= kBVTol && !st.empty;
            detail = fmt("s*=%.4f BV0 residual %.3e", st.s_star, st.bv_residual);
        }
        report(8, "structure (b) equilibrated", pass, detail);
    }

    const fs::path c1 = work / "commute1", c2 = work / "commute2";
    double commute_sec = 0.0;
    {
        const auto t0 = std::chrono::steady_clock::now();
        const int rc = run_cli("commute --config \"" + cfg_path("reference.json") + "\" --out \"" + c1.string() + "\"");
        commute_sec = seconds_since(t0);
        bool pass = rc == 0 && fs::exists(c1 / "commute.json");
        std::string detail = "commute command failed";
        if (pass) {
            const json j = json::parse(read_file((c1 / "commute.json").string()));
            detail.clear();
            for (const auto& [name, p] : j["paths"].items()) {
                const double b = p["m0cr_balance"].is_number() ? p["m0cr_balance"].get<double>() : 1e300;
                pass = pass && b <= kCommuteBalance;
                detail += name + " " + fmt("%.3e ", b);
            }
            pass = pass && j["paths"].size() == 3 && commute_sec < kCommuteSeconds;
            detail += fmt("(%.1f s)", commute_sec);
        }
        report(9, "commuting diagram", pass, detail);
    }
    {
        bool pass = sweep_ok(js.res);
        double worst = 0.0;
        std::size_t n = 0;
        if (pass) {
            const auto& a = js.res.terminal_analysis;
            for (const auto& r : a.samples) {
                if (r.lambda.regime != Regime::RateIndependent || !(r.in.p_norm > a.tol.tol_rate)) continue;
                worst = std::max(worst, r.hill / r.in.p_norm);
                ++n;
            }
            pass = worst <= kHillTol && n > 0;
        }
        report(10, "Hill duality", pass,
               fmt("max |H - <sigma_D,p'>| / |p'| = %.3e over %.0f plastic samples", worst, static_cast<double>(n)));
    }
    {
        const SuiteResult r = lsc_sequence_suite(ref.material, kLscLevels, kDefaultSeed, kLscTol);
        report(11, "lsc sequence", r.pass, fmt("min liminf - limit %.3e (tol %.0e)", r.value, kLscTol));
    }
    {
        const int rc = run_cli("commute --config \"" + cfg_path("reference.json") + "\" --out \"" + c2.string() + "\"");
        bool pass = rc == 0;
        std::size_t files = 0;
        std::string first_diff;
        if (pass) {
            for (const auto& e : fs::directory_iterator(c1)) {
                if (e.path().extension() != ".csv") continue;
                ++files;
                const fs::path other = c2 / e.path().filename();
                if (!fs::exists(other) || read_file(e.path().string()) != read_file(other.string())) {
                    pass = false;
                    if (first_diff.empty()) first_diff = e.path().filename().string();
                }
            }
            pass = pass && files > 0;
        }
        report(12, "determinism", pass,
               fmt("%.0f CSV files compared", static_cast<double>(files)) +
                   (first_diff.empty() ? "" : ", differs: " + first_diff));
    }

    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
