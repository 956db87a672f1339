#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "viscoflow/dissipation.hpp"
#include "viscoflow/energy.hpp"
#include "viscoflow/suites.hpp"

using namespace vf;

namespace {

// Rate solving 0 in dPsi_eps^nu(q') + D E_mu(t,q) component-wise in closed form.
State resolvent_rate(const Problem& P, double t, const State& q, double eps, double mu, double nu) {
    const auto& S = P.space;
    State r;
    const Vec gu = grad_u(P, t, q);
    r.u = -S.extend_free(S.K_D_llt.solve(S.restrict_free(gu))) / (eps * nu);
    const Vec chi = -grad_z(P, t, q).cwiseQuotient(S.node_mass);
    r.z.resize(chi.size());
    for (int n = 0; n < chi.size(); ++n) r.z[n] = std::min(chi[n] + P.mat.kappa, 0.0) / eps;
    const Vec vs = -grad_p(P, t, q, mu);
    r.p = Vec::Zero(vs.size());
    for (int c = 0; c < S.mesh.cells(); ++c) {
        const Vec2 s = vs.segment<2>(2 * c);
        const double ex = s.norm() - P.mat.radius(S.cell_z(q.z, c));
        if (ex > 0.0) r.p.segment<2>(2 * c) = (ex / (eps * nu)) * s.normalized();
    }
    return r;
}

}  // namespace

TEST_CASE("dissipation potentials on simple rates") {
    const Problem P = build_problem(vft::reference_config());
    const auto& S = P.space;
    const Vec zdot = Vec::Constant(S.n_z(), -2.0);
    CHECK(calR(P, zdot).value == doctest::Approx(0.5));
    Vec up = zdot;
    up[4] = 1e-3;
    CHECK(calR(P, up).infinite);
    const Vec z = Vec::Constant(S.n_z(), 0.5);
    Vec pd(S.n_p());
    for (int c = 0; c < S.mesh.cells(); ++c) pd.segment<2>(2 * c) = Vec2(3.0, 4.0);
    CHECK(calH(P, z, pd) == doctest::Approx(45.0 * 5.0));
    Vec chi = Vec::Constant(S.n_z(), -1.25);
    CHECK(dist_dR0(P, chi) == doctest::Approx(1.0));
    Vec vs(S.n_p());
    for (int c = 0; c < S.mesh.cells(); ++c) vs.segment<2>(2 * c) = Vec2(0.0, 50.0);
    CHECK(dist_dH0(P, z, vs) == doctest::Approx(5.0));
}

TEST_CASE("Fenchel gap vanishes at the closed-form resolvent rate") {
    const Problem P = build_problem(vft::reference_config());
    std::mt19937_64 rng(21);
    for (int k = 0; k < 20; ++k) {
        const State q = random_state(P, rng, 0.4);
        const double eps = std::pow(10.0, -1.0 - 2.0 * (k % 3) / 2.0);
        const double mu = 0.1 * (k % 4), nu = 0.5 / (1 + k % 5);
        const State r = resolvent_rate(P, 0.8, q, eps, mu, nu);
        const Extended g = fenchel_dual_gap(P, 0.8, q, r, eps, mu, nu);
        REQUIRE_FALSE(g.infinite);
        const double scale = std::max(1.0, std::abs(pairing(P, 0.8, q, r, mu)));
        CHECK(std::abs(g.value) <= 1e-10 * scale);
        State off = r;
        off.u *= 1.1;
        CHECK(fenchel_dual_gap(P, 0.8, q, off, eps, mu, nu).value > 0.0);
    }
}

TEST_CASE("eps scaling of the viscous potential") {
    const Problem P = build_problem(vft::reference_config());
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const State q = random_state(P, rng);
        State r = random_state(P, rng);
        r.z = -r.z;
        const double eps = 0.037 * (k + 1), nu = 0.3;
        const double lhs = psi_eps_nu(P, q.z, r, eps, nu).value;
        const double rhs = psi_eps_nu(P, q.z, eps * r, 1.0, nu).value / eps;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("conjugate equals the aggregated slope") {
    const Problem P = build_problem(vft::reference_config());
    std::mt19937_64 rng(9);
    const State q = random_state(P, rng);
    const SlopeParts s = slope_parts(P, 0.5, q, 0.2);
    const double d = slope_Dstar_mu_nu(P, 0.5, q, 0.2, 0.1);
    CHECK(d == doctest::Approx(std::sqrt(s.Su * s.Su / 0.1 + s.dz * s.dz + s.Wp * s.Wp / 0.1)));
    CHECK(psi_eps_nu_conj(P, 0.5, q, 0.01, 0.2, 0.1) == doctest::Approx(d * d / 0.02));
    CHECK(slope_Dstar0(P, 0.5, q) == doctest::Approx(std::hypot(surrogate_Su(P, 0.5, q), surrogate_Wp(P, 0.5, q))));
    CHECK_THROWS(slope_Dstar_mu_nu(P, 0.5, q, 0.2, 0.0));
}

TEST_CASE("Fenchel-Young inequality on random data") {
    const Problem P = build_problem(vft::reference_config());
    const SuiteResult r = fenchel_suite(P, 2000, kDefaultSeed, 1e-10);
    INFO(r.detail);
    CHECK(r.pass);
}
