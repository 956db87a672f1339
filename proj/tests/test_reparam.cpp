#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "viscoflow/reparam.hpp"

using namespace vf;

namespace {

struct Fixture {
    RunConfig cfg = vft::reference_config();
    Problem P;
    ViscousRun run;
    Fixture() {
        cfg.params = {0.1, 0.1, 0.1};
        cfg.solver.opt.N = 40;
        P = build_problem(cfg);
        run = solve(P, initial_state(P, cfg), cfg.params, cfg.solver.opt);
    }
};

}  // namespace

TEST_CASE("arclength parameterisation") {
    Fixture f;
    REQUIRE(f.run.complete);
    const ParamTrajectory tr = reparameterize(f.P, f.run);
    CHECK(tr.size() == 161);
    CHECK(tr.s.front() == 0.0);
    CHECK(tr.s.back() == doctest::Approx(tr.S));
    CHECK(tr.S >= 1.0);
    CHECK(tr.t.back() == doctest::Approx(1.0));
    CHECK(tr.knot_s.size() == 41);
    for (std::size_t i = 1; i < tr.size(); ++i) {
        CHECK(tr.t[i] >= tr.t[i - 1]);
        CHECK(tr.s[i] - tr.s[i - 1] == doctest::Approx(tr.S / 160).epsilon(1e-9));
    }
    for (std::size_t i = 0; i < tr.size(); ++i) {
        double w = 0.0;
        for (const auto& kw : tr.knot_weights[i]) w += kw.second;
        CHECK(w == doctest::Approx(1.0));
        // unit-speed curve up to the interpolation and the one-sided ends
        const double speed = tr.tp[i] + f.P.space.norm_H1D(tr.qp[i].u) + f.P.space.norm_Hm(tr.qp[i].z) +
                             f.P.space.norm_L2p(tr.qp[i].p);
        CHECK(speed <= 1.0 + 1e-9);
    }
    CHECK(kinematic_residual(f.P, tr) < 1e-10);
}

TEST_CASE("sampling and distances") {
    Fixture f;
    const ParamTrajectory tr = reparameterize(f.P, f.run, 81);
    CHECK(tr.size() == 81);
    double t;
    State q;
    sample_at(tr, 0.0, t, q);
    CHECK(t == 0.0);
    sample_at(tr, 1.0, t, q);
    CHECK(t == doctest::Approx(1.0));
    CHECK((q.z - tr.q.back().z).norm() < 1e-14);
    CHECK(curve_distance(f.P, tr, tr) == 0.0);
    ParamTrajectory shifted = tr;
    for (auto& ti : shifted.t) ti += 0.25;
    CHECK(curve_distance(f.P, tr, shifted) == doctest::Approx(0.25));
}

TEST_CASE("time rescaling leaves the image curve unchanged") {
    Fixture f;
    RunConfig c2 = f.cfg;
    c2.loading.speed *= 2.0;
    c2.loading.T *= 0.5;
    const Problem P2 = build_problem(c2);
    const ViscousRun r2 = solve(P2, initial_state(P2, c2), c2.params, c2.solver.opt);
    REQUIRE(r2.complete);
    const ParamTrajectory a = reparameterize(f.P, f.run, 0, 1.0);
    const ParamTrajectory b = reparameterize(P2, r2, 0, 2.0);
    CHECK(a.S == doctest::Approx(b.S).epsilon(1e-2));
    // viscous curves only agree up to O(eps) here
    CHECK(curve_distance(f.P, a, b) < 0.1);
}

TEST_CASE("balance residual of the reparameterized curve") {
    Fixture f;
    const ParamTrajectory tr = reparameterize(f.P, f.run);
    const auto res = reparam_balance_residual(f.P, tr, f.cfg.params);
    REQUIRE(res.size() >= 1);
    double tot = 0.0;
    for (double r : res) tot += std::abs(r);
    CHECK(tot <= 1e-2 * f.run.energy_scale());
}
