#include "viscoflow/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "viscoflow/contact.hpp"
#include "viscoflow/dissipation.hpp"
#include "viscoflow/energy.hpp"
#include "viscoflow/viscous_solver.hpp"

namespace vf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(const Vec& fd, const Vec& an, double floor) {
    return (fd - an).lpNorm<Eigen::Infinity>() / std::max(an.lpNorm<Eigen::Infinity>(), floor);
}

double state_distance(const DiscreteSpace& S, const State& a, const State& b) {
    const State d = a - b;
    return std::sqrt(std::pow(S.norm_H1D(d.u), 2) + std::pow(S.norm_Hm(d.z), 2) + std::pow(S.norm_L2p(d.p), 2));
}

}  // namespace

State random_state(const Problem& P, std::mt19937_64& rng, double z_lo) {
    const auto& S = P.space;
    std::uniform_real_distribution<double> U(-1.0, 1.0), Z(z_lo, 1.0);
    const double amp = std::max(P.load.w0.size() ? P.load.w0.lpNorm<Eigen::Infinity>() : 0.0, 1e-2);
    State q = zero_state(S, 1.0);
    for (int i = 0; i < q.u.size(); ++i) q.u[i] = amp * U(rng);
    q.u = S.zero_fixed(q.u);
    for (int i = 0; i < q.z.size(); ++i) q.z[i] = Z(rng);
    for (int i = 0; i < q.p.size(); ++i) q.p[i] = 0.5 * amp * U(rng);
    return q;
}

SuiteResult gradient_suite(const Problem& P, int samples, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    const auto& S = P.space;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> T(0.0, P.load.T), MU(0.0, 0.1);
    const double h = 1e-6;
    double worst = 0.0;
    std::string where;
    for (int k = 0; k < samples; ++k) {
        const State q = random_state(P, rng);
        const double t = T(rng), mu = MU(rng);
        const double floor = 1e-8 * std::max(1.0, std::abs(energy(P, t, q, mu).total));

        auto Eu = [&](const Vec& x) { return energy(P, t, {S.extend_free(x), q.z, q.p}, mu).total; };
        auto Ez = [&](const Vec& x) { return energy(P, t, {q.u, x, q.p}, mu).total; };
        auto Ep = [&](const Vec& x) { return energy(P, t, {q.u, q.z, x}, mu).total; };
        auto Et = [&](const Vec& x) { return energy(P, x[0], q, mu).total; };

        Vec gp = grad_p(P, t, q, mu);
        for (int c = 0; c < S.mesh.cells(); ++c) gp.segment<2>(2 * c) *= S.cell_areas[c];
        const double errs[] = {
            rel_err(fd_gradient(Eu, S.restrict_free(q.u), h), S.restrict_free(grad_u(P, t, q, mu)), floor),
            rel_err(fd_gradient(Ez, q.z, h), grad_z(P, t, q, mu), floor),
            rel_err(fd_gradient(Ep, q.p, h), gp, floor),
            rel_err(fd_gradient(Et, Vec::Constant(1, t), h), Vec::Constant(1, partial_t_energy(P, t, q)), floor)};
        const char* names[] = {"D_u", "D_z", "D_p", "d_t"};
        for (int i = 0; i < 4; ++i)
            if (errs[i] > worst) {
                worst = errs[i];
                where = std::string(names[i]) + " at sample " + std::to_string(k);
            }
    }
    return {"gradients", worst <= tol, worst, tol, seconds_since(t0), where};
}

SuiteResult constitutive_suite(const Material& m, int samples, std::uint64_t seed) {
    const auto t0 = Clock::now();
    m.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> Z(0.0, 2.0), U(-1.0, 1.0), Zpos(1e-3, 2.0);
    const double gmin = m.gamma1 * std::min(m.ref_trace, m.ref_dev);
    const double gmax = m.gamma2 * std::max(m.ref_trace, m.ref_dev);
    // Lipschitz constant of C' : max |s''| = 6
    const double lip = 6.0 * (m.gamma2 - m.gamma1) * std::max(m.ref_trace, m.ref_dev);
    const double rel = 1e-12;
    int fails[9] = {};
    const char* names[9] = {"C1", "C2", "C3", "W1", "W2", "K1", "K2", "K3", "D"};
    auto rnd3 = [&] { return Vec3(U(rng), U(rng), U(rng)); };
    auto rnd2 = [&] { return Vec2(U(rng), U(rng)); };

    for (int k = 0; k < samples; ++k) {
        double z1 = Z(rng), z2 = Z(rng);
        if (z1 > z2) std::swap(z1, z2);
        const Vec3 xi = rnd3();
        const double n2 = xi.squaredNorm();

        // C1: C' Lipschitz, and C' the derivative of C
        const double dC = (m.elastic_derivative(z1, xi) - m.elastic_derivative(z2, xi)).norm();
        const double h = 1e-6, zc = 0.5 * (z1 + z2);
        const Vec3 fdC = (m.elastic_apply(zc + h, xi) - m.elastic_apply(zc - h, xi)) / (2 * h);
        if (dC > lip * (z2 - z1) * xi.norm() * (1 + rel) + 1e-14 ||
            (fdC - m.elastic_derivative(zc, xi)).norm() > 1e-6 * (1.0 + lip) * xi.norm())
            ++fails[0];
        // C2: z -> C(z)xi:xi nondecreasing
        if (m.elastic_apply(z2, xi).dot(xi) < m.elastic_apply(z1, xi).dot(xi) - rel * gmax * n2) ++fails[1];
        // C3: uniform bounds
        const double cq = m.elastic_apply(z1, xi).dot(xi);
        if (cq < gmin * n2 * (1 - rel) || cq > gmax * n2 * (1 + rel)) ++fails[2];

        // W1: W >= 0 and C^2 on (0, inf)
        const double zw = Zpos(rng), hw = 1e-5 * zw;
        const double fd2 = (m.damage_W(zw + hw) - 2 * m.damage_W(zw) + m.damage_W(zw - hw)) / (hw * hw);
        const double fd1 = (m.damage_W(zw + hw) - m.damage_W(zw - hw)) / (2 * hw);
        if (m.damage_W(zw) < 0.0 || std::abs(fd1 - m.damage_Wprime(zw)) > 1e-6 * (1 + std::abs(m.damage_Wprime(zw))) ||
            std::abs(fd2 - m.damage_Wsecond(zw)) > 1e-3 * (1 + std::abs(m.damage_Wsecond(zw))))
            ++fails[3];
        // W2: s^4 W(s) blows up as s -> 0 (n = 2)
        const double s1 = zw * 1e-3, s2 = s1 * 1e-2;
        if (!(std::pow(s2, 4) * m.damage_W(s2) > std::pow(s1, 4) * m.damage_W(s1))) ++fails[4];

        // K1: convexity of K(z) via midpoints of projected points
        const Vec2 a = m.project_K(z1, 3 * m.R_bar * rnd2()), b = m.project_K(z1, 3 * m.R_bar * rnd2());
        if (m.dist_K(z1, 0.5 * (a + b)) > 1e-12 * m.R_bar || m.dist_K(z1, a) > 1e-12 * m.R_bar) ++fails[5];
        // K2: B_r <= K(z1) <= K(z2) <= B_R
        const Vec2 dir = rnd2().normalized();
        const double r1 = m.radius(z1), r2 = m.radius(z2);
        if (m.dist_K(z1, m.r_bar * dir) > 1e-12 * m.R_bar || m.dist_K(z2, r1 * dir) > 1e-12 * m.R_bar || r2 > m.R_bar * (1 + rel) ||
            m.support_H(z1, dir) > m.support_H(z2, dir) + rel * m.R_bar)
            ++fails[6];
        // K3: Hausdorff distance by boundary sampling equals the closed form, which obeys C_K |z1 - z2|
        double dh = 0.0;
        for (int j = 0; j < 16; ++j) {
            const double th = 2 * M_PI * j / 16;
            const Vec2 e(std::cos(th), std::sin(th));
            dh = std::max({dh, m.dist_K(z2, r1 * e), m.dist_K(z1, r2 * e)});
        }
        if (std::abs(dh - m.hausdorff_K(z1, z2)) > 1e-12 * m.R_bar ||
            m.hausdorff_K(z1, z2) > m.C_K() * (z2 - z1) * (1 + rel) + 1e-15)
            ++fails[7];
        // D1-D2: constant D with delta_1 = delta_2 = delta
        const Vec3 A = rnd3();
        const double dq = m.viscosity_apply(A).dot(A);
        if (!(m.delta > 0.0) || std::abs(dq - m.delta * A.squaredNorm()) > rel * m.delta * A.squaredNorm()) ++fails[8];
    }
    int total = 0;
    std::ostringstream os;
    for (int i = 0; i < 9; ++i) {
        total += fails[i];
        if (fails[i]) os << names[i] << ":" << fails[i] << " ";
    }
    return {"constitutive", total == 0, static_cast<double>(total), 0.0, seconds_since(t0), os.str()};
}

SuiteResult step_oracle_suite(const Material& m, int steps, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    const Problem P = tiny_problem(m, 0.5);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> T(0.2, 1.0), Z(0.5, 1.0);
    std::uniform_int_distribution<int> pick(0, 1);
    const double lv[2] = {1e-1, 1e-2};
    double worst = 0.0;
    std::string where;
    for (int k = 0; k < steps; ++k) {
        ParamTriple par;
        do {
            par = {lv[pick(rng)], lv[pick(rng)], lv[pick(rng)]};
        } while (par.nu > par.mu);
        State q = random_state(P, rng, 0.5);
        q.u *= 0.2;
        const double t = T(rng), dt = 0.05;
        const State a = step(P, q, t, dt, par);
        const State b = brute_force_step(P, q, t, dt, par);
        const double d = state_distance(P.space, a, b);
        if (d > worst) {
            worst = d;
            std::ostringstream os;
            os << "step " << k << " (eps,mu,nu)=(" << par.eps << "," << par.mu << "," << par.nu << ")";
            where = os.str();
        }
    }
    return {"step_oracle", worst <= tol, worst, tol, seconds_since(t0), where};
}

namespace {

// Closed-form minimiser of Psi_eps^nu(q, .) + <D E_mu(t,q), .>
State resolvent_rate(const Problem& P, double t, const State& q, double eps, double mu, double nu) {
    const auto& S = P.space;
    State r;
    r.u = -S.extend_free(S.K_D_llt.solve(S.restrict_free(grad_u(P, t, q)))) / (eps * nu);
    const Vec chi = -grad_z(P, t, q).cwiseQuotient(S.node_mass);
    r.z = (chi.array() + P.mat.kappa).min(0.0).matrix() / eps;
    const Vec vs = -grad_p(P, t, q, mu);
    r.p = Vec::Zero(vs.size());
    for (int c = 0; c < S.mesh.cells(); ++c) {
        const Vec2 v = vs.segment<2>(2 * c);
        const double ex = v.norm() - P.mat.radius(S.cell_z(q.z, c));
        if (ex > 0.0) r.p.segment<2>(2 * c) = (ex / (eps * nu)) * v.normalized();
    }
    return r;
}

}  // namespace

SuiteResult fenchel_suite(const Problem& P, int samples, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> T(0.0, P.load.T), L(-3.0, 0.0), U(-1.0, 1.0);
    const double inf = std::numeric_limits<double>::infinity();
    double worst = inf, worst_rel = inf, near = inf;
    for (int k = 0; k < samples; ++k) {
        const State q = random_state(P, rng);
        const double t = T(rng);
        const double eps = std::pow(10.0, L(rng)), mu = std::pow(10.0, L(rng));
        const double nu = mu * std::pow(10.0, L(rng) / 3.0);
        State qd = random_state(P, rng);
        for (int i = 0; i < qd.z.size(); ++i) qd.z[i] = -std::abs(U(rng));
        if (k % 2 == 0) {
            qd = std::pow(10.0, 2.0 * L(rng)) * qd;
            const Extended g = fenchel_dual_gap(P, t, q, qd, eps, mu, nu);
            if (!g.infinite) worst = std::min(worst, g.value);
            continue;
        }
        // perturbed resolvent rates: the gap is a small difference of large terms, judged relative to them
        const State r = resolvent_rate(P, t, q, eps, mu, nu);
        qd = r + std::pow(10.0, 3.0 * L(rng)) * (qd - r);
        qd.z = qd.z.cwiseMin(0.0);
        const Extended g = fenchel_dual_gap(P, t, q, qd, eps, mu, nu);
        if (g.infinite) continue;
        const double scale = std::max({1.0, psi_eps_nu(P, q.z, qd, eps, nu).value,
                                       psi_eps_nu_conj(P, t, q, eps, mu, nu), std::abs(pairing(P, t, q, qd, mu))});
        worst_rel = std::min(worst_rel, g.value / scale);
        near = std::min(near, std::abs(g.value) / scale);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "min gap on random rates; near equality: min relative gap %.2e, closest %.2e",
                  worst_rel, near);
    return {"fenchel_young", worst >= -tol && worst_rel >= -tol, worst, tol, seconds_since(t0), buf};
}

SuiteResult lsc_sequence_suite(const Material& m, int levels, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    const Problem P = tiny_problem(m, 0.5);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> T(0.2, 1.0), U(-1.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    std::string where;
    // (u,p)-jump limits (t' = 0, z' = 0, p = 0), where both potentials stay finite
    for (int draw = 0; draw < 4; ++draw) {
        State q = random_state(P, rng, 0.5);
        q.p.setZero();
        State dq = random_state(P, rng, 0.5);
        dq.z.setZero();
        State qp = random_state(P, rng), dqp = random_state(P, rng);
        qp.z.setZero();
        dqp.z.setZero();
        const double t = T(rng);
        const ContactValue lim = M0_CR(P, t, q, 0.0, qp);
        const double vlim = lim.finite() ? lim.finite_part : std::numeric_limits<double>::infinity();
        double liminf = std::numeric_limits<double>::infinity();
        // states converge like 4^-k, faster than mu_k = 2^-k; liminf estimated on the last terms
        for (int k = levels - 3; k <= levels; ++k) {
            const double f = std::ldexp(1.0, -2 * k);
            const State qk = q + f * dq;
            const State qpk = qp + f * dqp;
            const ContactValue v = M0_mu0(P, t, qk, 0.0, qpk, std::ldexp(1.0, -k));
            liminf = std::min(liminf, v.finite() ? v.finite_part : std::numeric_limits<double>::infinity());
        }
        const double margin = std::isinf(vlim) ? (std::isinf(liminf) ? 0.0 : -vlim) : liminf - vlim;
        if (margin < worst) {
            worst = margin;
            where = "sequence " + std::to_string(draw);
        }
    }
    return {"lsc_sequence", worst >= -tol, worst, tol, seconds_since(t0), where};
}

}  // namespace vf
