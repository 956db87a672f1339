#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "viscoflow/bv_analysis.hpp"

using namespace vf;

TEST_CASE("sweep grids for the three limit paths") {
    const std::vector<double> lv{1e-1, 1e-2, 1e-3};
    const auto j = sweep_points(SweepPath::Joint, lv, 1e-4);
    REQUIRE(j.size() == 3);
    CHECK(j[2].eps == 1e-3);
    CHECK(j[2].nu == 1e-3);
    const auto e = sweep_points(SweepPath::EpsFirst, lv, 1e-4);
    REQUIRE(e.size() == 6);
    CHECK(e[2].mu == 1e-1);
    CHECK(e[5].eps == 1e-4);
    CHECK(e[5].mu == 1e-3);
    CHECK(e[5].nu == 1e-3);
    const auto n = sweep_points(SweepPath::EpsNuFirst, lv, 1e-4);
    REQUIRE(n.size() == 6);
    CHECK(n[1].nu == 1e-2);
    CHECK(n[1].mu == 1e-1);
    CHECK(n[5].nu == 1e-4);
    CHECK(n[5].mu == 1e-3);
    CHECK_THROWS(sweep_points(SweepPath::Joint, {1e-2, 1e-1}, 1e-4));
    CHECK_THROWS(sweep_points(SweepPath::EpsFirst, lv, 1e-2));
    CHECK(parse_path("EPSNU_FIRST") == SweepPath::EpsNuFirst);
    CHECK(to_string(SweepPath::EpsFirst) == "EPS_FIRST");
    CHECK_THROWS(parse_path("joint-ish"));
}

TEST_CASE("planted damage jump: lambda_z recovered") {
    const Problem P = tiny_problem(vft::reference_material(), 0.5);
    State q0 = zero_state(P.space, 0.95);
    const ManufacturedJump mj = manufactured_jump(P, q0, 1.0, JumpKind::ViscousZ, 0.0, 0.005);
    const CurveAnalysis a = analyze_curve(P, mj.traj, {1e-4, 0.0, 1e-4});
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < a.samples.size(); ++i) {
        CHECK(a.samples[i].lambda.regime == Regime::ViscousZ);
        worst = std::max(worst, std::abs(a.samples[i].lambda.lambda_z - mj.lambda_z[i]));
    }
    CHECK(worst < 1e-3);
    CHECK(switching_residuals(a).max_t_lz < 1e-12);
}

TEST_CASE("planted (u,p) jump: lambda_up recovered") {
    const Problem P = tiny_problem(vft::reference_material(), 0.5);
    State q0 = zero_state(P.space, 1.0);
    q0.u[2] = 0.05;
    const ManufacturedJump mj = manufactured_jump(P, q0, 0.4, JumpKind::ViscousUP, 0.0, 0.005);
    const CurveAnalysis a = analyze_curve(P, mj.traj, {1e-4, 0.0, 1e-4});
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < a.samples.size(); ++i) {
        CHECK(a.samples[i].lambda.regime == Regime::ViscousUP);
        worst = std::max(worst, std::abs(a.samples[i].lambda.lambda_up - mj.lambda_up[i]));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("curve analysis of a viscous run") {
    RunConfig cfg = vft::reference_config();
    cfg.params = {0.01, 0.01, 0.01};
    cfg.solver.opt.N = 100;
    const Problem P = build_problem(cfg);
    const ViscousRun run = solve(P, initial_state(P, cfg), cfg.params, cfg.solver.opt);
    REQUIRE(run.complete);
    const ParamTrajectory tr = reparameterize(P, run);
    const CurveAnalysis a = analyze_curve(P, tr, cfg.params, cfg.solver.tol);
    REQUIRE(a.samples.size() == tr.size());
    const auto lam = recover_lambda(a);
    for (const auto& l : lam) {
        CHECK(l.lambda_z >= 0.0);
        CHECK(l.lambda_z <= 1.0);
        CHECK(l.lambda_up >= 0.0);
        CHECK(l.lambda_up <= 1.0);
    }
    const SwitchingReport sw = switching_residuals(a);
    CHECK(sw.max_t_lz < 2e-2);
    CHECK(m0cr_balance_residual(a) < 1e-2);
    const auto hill = hill_duality_check(P, tr, cfg.params.mu);
    CHECK(hill.size() == tr.size());
    const auto chain = chain_rule_residual(P, tr, cfg.params);
    CHECK(chain.size() == tr.size());
    const StructureReport st = structure_detect(P, tr, a, 1e-6, 1e-3);
    CHECK(st.s_star >= 0.0);
    CHECK(st.s_star <= tr.S);
}

TEST_CASE("static curve has no switching activity") {
    RunConfig cfg = vft::reference_config();
    cfg.loading.profile = "static";
    cfg.loading.w_amp = Vec2::Zero();
    cfg.loading.z0 = 1.0;
    cfg.solver.opt.N = 10;
    const Problem P = build_problem(cfg);
    const ViscousRun run = solve(P, initial_state(P, cfg), cfg.params, cfg.solver.opt);
    const ParamTrajectory tr = reparameterize(P, run);
    const CurveAnalysis a = analyze_curve(P, tr, cfg.params);
    const SwitchingReport sw = switching_residuals(a);
    CHECK(sw.max_t_lz == 0.0);
    CHECK(sw.max_t_lup == 0.0);
    CHECK(sw.max_lup_lz == 0.0);
    CHECK(m0cr_balance_residual(a) < 1e-12);
}
