#include "viscoflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unknowns packed as (u on free dofs, z, p).
struct Packing {
    const DiscreteSpace* S;
    int nu, nz, np;

    int size() const { return nu + nz + np; }
    Vec pack(const State& q) const {
        Vec x(size());
        x << S->restrict_free(q.u), q.z, q.p;
        return x;
    }
    State unpack(const Vec& x) const {
        return {S->extend_free(x.head(nu)), x.segment(nu, nz), x.tail(np)};
    }
};

struct StepFunctional {
    const Problem& P;
    const State& q_prev;
    double t, dt;
    ParamTriple par;
    Packing pk;
    double z_min;
    Vec radius;  // r(z_prev) per cell

    // Everything except the plastic support term; finite on the box.
    double smooth(const Vec& x) const {
        const auto& S = P.space;
        const State q = pk.unpack(x);
        const State d = q - q_prev;
        const double a = par.eps / dt;
        double v = energy(P, t, q, par.mu).total;
        const Vec du = S.restrict_free(d.u);
        v += 0.5 * a * par.nu * du.dot(S.K_D * du);
        for (int i = 0; i < pk.nz; ++i)
            v += S.node_mass[i] * (0.5 * a * d.z[i] * d.z[i] - P.mat.kappa * d.z[i]);
        for (int c = 0; c < S.mesh.cells(); ++c)
            v += 0.5 * a * par.nu * S.cell_areas[c] * d.p.segment<2>(2 * c).squaredNorm();
        return v;
    }
    double nonsmooth(const Vec& x) const {
        const auto& S = P.space;
        double v = 0.0;
        for (int c = 0; c < S.mesh.cells(); ++c)
            v += S.cell_areas[c] * radius[c] *
                 (x.segment<2>(pk.nu + pk.nz + 2 * c) - q_prev.p.segment<2>(2 * c)).norm();
        return v;
    }
    bool feasible(const Vec& x) const {
        for (int i = 0; i < pk.nz; ++i) {
            const double z = x[pk.nu + i];
            if (z < z_min || z > q_prev.z[i]) return false;
        }
        return true;
    }
    double total(const Vec& x) const { return feasible(x) ? smooth(x) + nonsmooth(x) : kInf; }

    Vec prox(const Vec& y, double tau) const {
        const auto& S = P.space;
        Vec x = y;
        for (int i = 0; i < pk.nz; ++i) x[pk.nu + i] = std::clamp(y[pk.nu + i], z_min, q_prev.z[i]);
        for (int c = 0; c < S.mesh.cells(); ++c) {
            const Vec2 pp = q_prev.p.segment<2>(2 * c);
            const Vec2 v = y.segment<2>(pk.nu + pk.nz + 2 * c) - pp;
            const double n = v.norm(), thr = tau * S.cell_areas[c] * radius[c];
            x.segment<2>(pk.nu + pk.nz + 2 * c) = n > thr ? Vec2(pp + (1.0 - thr / n) * v) : pp;
        }
        return x;
    }
};

}  // namespace

Problem tiny_problem(const Material& mat, double w_amp, double speed, double T) {
    Mesh mesh;
    mesh.nx = 2;
    mesh.ny = 1;
    mesh.lx = 1.0;
    mesh.ly = 0.5;
    Problem P;
    P.mat = mat;
    P.space = build_space(mesh, Dirichlet::LeftRight, {}, mat);
    P.load = make_loading(P.space, mat, Profile::Ramp, speed, T, Vec2(w_amp, 0.5 * w_amp), Vec3::Zero(), -1.0);
    return P;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be positive");
    Vec g(x.size());
    Vec y = x;
    for (int i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        const double fp = f(y);
        y[i] = x[i] - h;
        const double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

State brute_force_step(const Problem& P, const State& q_prev, double t, double dt, const ParamTriple& par,
                       const OracleOptions& opt) {
    const auto& S = P.space;
    if (!(dt > 0.0)) throw std::invalid_argument("brute_force_step: dt must be positive");
    Packing pk{&S, S.n_free(), S.n_z(), S.n_p()};
    if (pk.size() > 16) throw std::invalid_argument("brute_force_step: instance too large for the oracle");

    StepFunctional F{P, q_prev, t, dt, par, pk, opt.z_min, Vec(S.mesh.cells())};
    for (int c = 0; c < S.mesh.cells(); ++c) F.radius[c] = P.mat.radius(S.cell_z(q_prev.z, c));

    Vec x = pk.pack(q_prev);
    double fx = F.total(x);
    if (!std::isfinite(fx)) throw std::runtime_error("brute_force_step: functional not finite at q_prev");

    double span = opt.initial_span;
    const int half = opt.grid_points / 2;
    for (int round = 0; round < opt.rounds; ++round) {
        for (int sweep = 0; sweep < 3; ++sweep) {
            for (int i = 0; i < x.size(); ++i) {
                const double x0 = x[i];
                double best = x0;
                for (int k = -half; k <= half; ++k) {
                    x[i] = x0 + span * k / std::max(half, 1);
                    const double v = F.total(x);
                    if (v < fx) {
                        fx = v;
                        best = x[i];
                    }
                }
                x[i] = best;
            }
        }
        span /= 4.0;
    }

    auto smooth = [&](const Vec& y) { return F.smooth(y); };
    // FD stencils must stay inside the box; evaluate the smooth part on a clipped copy.
    auto grad = [&](const Vec& y) {
        Vec yc = y;
        for (int i = 0; i < pk.nz; ++i)
            yc[pk.nu + i] = std::clamp(y[pk.nu + i], opt.z_min + 2 * opt.fd_step, 1e300);
        return fd_gradient(smooth, yc, opt.fd_step);
    };

    double L = 1.0;
    Vec y = x, x_old = x;
    double tk = 1.0;
    double obj = F.total(x);
    for (int it = 0; it < opt.max_polish; ++it) {
        const Vec gy = grad(y);
        const double fy = F.smooth(y);
        Vec xn;
        for (;;) {
            xn = F.prox(y - gy / L, 1.0 / L);
            const Vec d = xn - y;
            if (F.smooth(xn) <= fy + gy.dot(d) + 0.5 * L * d.squaredNorm() + 1e-15 * std::abs(fy)) break;
            L *= 2.0;
            if (L > 1e16) break;
        }
        const double objn = F.total(xn);
        if (objn > obj) {
            if (tk == 1.0 || L > 1e16) break;  // no descent left even without momentum
            y = x;
            tk = 1.0;
            continue;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        x_old = x;
        x = xn;
        obj = objn;
        y = x + ((tk - 1.0) / tn) * (x - x_old);
        tk = tn;
        L = std::max(L / 1.5, 1e-8);
        if ((x - x_old).norm() <= opt.polish_tol * std::max(1.0, x.norm())) break;
    }
    return pk.unpack(x);
}

ManufacturedJump manufactured_jump(const Problem& P, const State& q0, double t0, JumpKind kind, double mu, double S,
                                   int samples, int substeps) {
    const auto& sp = P.space;
    if (samples < 3 || substeps < 1 || !(S > 0.0)) throw std::invalid_argument("manufactured_jump: bad resolution");
    const double kappa = P.mat.kappa;

    auto planted_lz = [&](double s) { return 0.5 + 0.25 * std::sin(std::numbers::pi * s / S); };
    const double lt = 1.0;

    auto rhs = [&](double s, const State& q) {
        State d{Vec::Zero(q.u.size()), Vec::Zero(q.z.size()), Vec::Zero(q.p.size())};
        if (kind == JumpKind::ViscousZ) {
            const double l = planted_lz(s);
            const Vec g = grad_z(P, t0, q).cwiseQuotient(sp.node_mass);
            for (int i = 0; i < g.size(); ++i) d.z[i] = -((1.0 - l) / l) * std::max(g[i] - kappa, 0.0);
        } else {
            const Vec gu = sp.restrict_free(grad_u(P, t0, q));
            d.u = sp.extend_free(-sp.K_D_llt.solve(gu) / lt);
            const Vec gp = grad_p(P, t0, q, mu);
            for (int c = 0; c < sp.mesh.cells(); ++c) {
                const Vec2 v = -gp.segment<2>(2 * c);
                const double r = P.mat.radius(sp.cell_z(q.z, c)), n = v.norm();
                if (n > r) d.p.segment<2>(2 * c) = ((n - r) / lt) * v / n;
            }
        }
        return d;
    };

    ManufacturedJump out;
    auto& tr = out.traj;
    tr.params = {0.0, mu, 0.0};
    tr.S = S;
    tr.s.resize(samples);
    tr.t.assign(samples, t0);
    tr.q.resize(samples);
    tr.tp.assign(samples, 0.0);
    tr.qp.resize(samples);
    State q = q0;
    const double ds = S / (samples - 1);
    const double h = ds / substeps;
    for (int i = 0; i < samples; ++i) {
        const double s = i * ds;
        tr.s[i] = s;
        tr.q[i] = q;
        tr.qp[i] = rhs(s, q);
        out.lambda_z.push_back(kind == JumpKind::ViscousZ ? planted_lz(s) : 1.0);
        out.lambda_up.push_back(kind == JumpKind::ViscousUP ? lt / (1.0 + lt) : 0.0);
        if (i + 1 == samples) break;
        for (int k = 0; k < substeps; ++k) {
            const double s0 = s + k * h;
            const State k1 = rhs(s0, q);
            const State k2 = rhs(s0 + 0.5 * h, q + (0.5 * h) * k1);
            const State k3 = rhs(s0 + 0.5 * h, q + (0.5 * h) * k2);
            const State k4 = rhs(s0 + h, q + h * k3);
            q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return out;
}

}  // namespace vf
