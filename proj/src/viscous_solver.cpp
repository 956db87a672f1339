#include "viscoflow/viscous_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CellResult {
    Vec2 p;
    Vec3 sigma;
    Mat3 tangent;
    double value;
};

// Exact minimiser over the plastic strain of one cell for a given total strain E:
//   r|pi| + a/2|pi|^2 + mu/2|pp+pi|^2 + 1/2 (E - pp - pi) : C (E - pp - pi)
CellResult cell_plastic(const Material& M, const Vec3& E, const Vec2& pp, double zc, double zp_cell, double a,
                        double mu) {
    const double k = M.stiffness(zc);
    const double ct = k * M.ref_trace;
    const double cd = k * M.ref_dev;
    const double r = M.radius(zp_cell);
    const Vec2 Ed = dev_part(E);
    const Vec2 tau = cd * (Ed - pp) - mu * pp;
    const double A = a + mu + cd;
    const double nt = tau.norm();

    CellResult out;
    out.tangent = Mat3::Zero();
    out.tangent(0, 0) = ct;
    Vec2 pi = Vec2::Zero();
    Mat2 dpi = Mat2::Zero();
    if (nt > r) {
        const Vec2 n = tau / nt;
        pi = ((nt - r) / A) * n;
        const Mat2 nn = n * n.transpose();
        dpi = (cd / A) * ((1.0 - r / nt) * (Mat2::Identity() - nn) + nn);
    }
    out.tangent.block<2, 2>(1, 1) = cd * (Mat2::Identity() - dpi);
    out.p = pp + pi;
    const Vec2 ed = Ed - out.p;
    out.sigma = Vec3(ct * E[0], cd * ed[0], cd * ed[1]);
    out.value = 0.5 * ct * E[0] * E[0] + r * pi.norm() + 0.5 * a * pi.squaredNorm() + 0.5 * mu * out.p.squaredNorm() +
                0.5 * cd * ed.squaredNorm();
    return out;
}

struct UPEval {
    double phi;
    Vec grad;  // free dofs
    Mat hess;  // free dofs
    Vec p;
};

UPEval eval_up(const Problem& P, double t, const Vec& u, const Vec& zc, const Vec& zpc, const State& q_prev,
               double a, double mu, bool want_hess) {
    const auto& S = P.space;
    const int nc = S.mesh.cells();
    const Vec w = P.load.w(t);
    const Vec E = S.strain(u + w);
    UPEval ev;
    ev.p.resize(2 * nc);
    Vec sigma(3 * nc);
    Mat Dt;
    if (want_hess) Dt = Mat::Zero(3 * nc, 3 * nc);
    double psi = 0.0;
    for (int c = 0; c < nc; ++c) {
        const CellResult cr =
            cell_plastic(P.mat, E.segment<3>(3 * c), q_prev.p.segment<2>(2 * c), zc[c], zpc[c], a, mu);
        ev.p.segment<2>(2 * c) = cr.p;
        sigma.segment<3>(3 * c) = cr.sigma;
        psi += S.cell_areas[c] * cr.value;
        if (want_hess) Dt.block<3, 3>(3 * c, 3 * c) = S.cell_areas[c] * cr.tangent;
    }
    const Vec du = S.restrict_free(u - q_prev.u);
    const Vec Kdu = S.K_D * du;
    const Vec F = P.load.F(t);
    ev.phi = 0.5 * a * du.dot(Kdu) + psi - F.dot(u + w);
    ev.grad = a * Kdu + S.restrict_free(S.div_T(sigma) - F);
    if (want_hess) {
        Mat Bf(3 * nc, S.n_free());
        for (int k = 0; k < S.n_free(); ++k) Bf.col(k) = S.B.col(S.free_dofs[k]);
        ev.hess = a * S.K_D + Bf.transpose() * Dt * Bf;
    }
    return ev;
}

// (u,p)-step: p eliminated cell-wise by the exact shrinkage, u by a Newton
// iteration with the consistent tangent.
void up_step(const Problem& P, double t, double dt, const ParamTriple& par, const Vec& z, const State& q_prev,
             bool current_coefficient, Vec& u, Vec& p) {
    const auto& S = P.space;
    const double a = par.eps * par.nu / dt;
    const Vec zc = S.cell_values(z);
    const Vec zpc = current_coefficient ? zc : S.cell_values(q_prev.z);
    UPEval ev = eval_up(P, t, u, zc, zpc, q_prev, a, par.mu, true);
    for (int it = 0; it < 100; ++it) {
        const Vec d = -ev.hess.ldlt().solve(ev.grad);
        const double slope = ev.grad.dot(d);
        if (!(slope < 0.0) || d.norm() <= 1e-15 * (1.0 + S.restrict_free(u).norm())) break;
        double alpha = 1.0;
        Vec u_try;
        UPEval trial;
        bool accepted = false;
        const bool measurable = -slope > 1e-13 * (1.0 + std::abs(ev.phi));
        for (int ls = 0; measurable && ls < 40; ++ls) {
            u_try = u + alpha * S.extend_free(d);
            trial = eval_up(P, t, u_try, zc, zpc, q_prev, a, par.mu, true);
            if (trial.phi <= ev.phi + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // no decrease measurable in floating point: accept the full step only if it shrinks the gradient
            u_try = u + S.extend_free(d);
            trial = eval_up(P, t, u_try, zc, zpc, q_prev, a, par.mu, true);
            if (trial.grad.norm() >= ev.grad.norm()) break;
        }
        u = u_try;
        ev = trial;
        if (alpha == 1.0 && d.norm() <= 1e-14 * (1.0 + S.restrict_free(u).norm())) break;
    }
    p = ev.p;
}

struct ZEval {
    double phi;
    Vec grad;
};

ZEval eval_z(const Problem& P, const Vec& z, const Vec& zp, const Fields& f, double c_visc, double kappa) {
    const auto& S = P.space;
    const auto& m = S.node_mass;
    ZEval ev;
    ev.phi = 0.5 * z.dot(S.Am * z);
    ev.grad = S.Am * z;
    for (int n = 0; n < S.n_z(); ++n) {
        const double dz = z[n] - zp[n];
        ev.phi += m[n] * (-kappa * dz + 0.5 * c_visc * dz * dz + P.mat.damage_W(z[n]));
        ev.grad[n] += m[n] * (-kappa + c_visc * dz + P.mat.damage_Wprime(z[n]));
    }
    for (int c = 0; c < S.mesh.cells(); ++c) {
        const Vec3 e = f.e.segment<3>(3 * c);
        const double ee = e.dot(P.mat.ref_apply(e));
        const double zc = S.cell_z(z, c);
        ev.phi += 0.5 * S.cell_areas[c] * P.mat.stiffness(zc) * ee;
        const double h = 0.5 * P.mat.stiffness_d(zc) * ee * 0.25 * S.cell_areas[c];
        for (int n : S.mesh.cell_nodes(c)) ev.grad[n] += h;
    }
    return ev;
}

// z-step: projected Newton on  z_min <= z <= z_prev
Vec z_step(const Problem& P, double t, double dt, const ParamTriple& par, const State& q, const Vec& zp,
           double z_min) {
    const auto& S = P.space;
    const int nz = S.n_z();
    const double c_visc = par.eps / dt;
    Fields f = fields(P, t, q);
    Vec z = q.z.cwiseMax(z_min).cwiseMin(zp);
    const Vec lo = Vec::Constant(nz, z_min);
    auto proj = [&](const Vec& v) -> Vec { return v.cwiseMax(lo).cwiseMin(zp); };

    ZEval ev = eval_z(P, z, zp, f, c_visc, P.mat.kappa);
    for (int it = 0; it < 200; ++it) {
        f.zc = S.cell_values(z);
        Mat H = hess_z(P, z, f);
        for (int n = 0; n < nz; ++n) H(n, n) += c_visc * S.node_mass[n];
        const Vec hd = H.diagonal().cwiseMax(1e-300);
        const double w = (z - proj(z - ev.grad.cwiseQuotient(hd))).lpNorm<Eigen::Infinity>();
        if (w <= 1e-15) break;
        const double eb = std::min(1e-8, w);
        std::vector<int> fr;
        std::vector<char> active(nz, 0);
        for (int n = 0; n < nz; ++n) {
            const bool at_lo = z[n] <= lo[n] + eb && ev.grad[n] > 0.0;
            const bool at_hi = z[n] >= zp[n] - eb && ev.grad[n] < 0.0;
            if (at_lo || at_hi)
                active[n] = 1;
            else
                fr.push_back(n);
        }
        Vec d = Vec::Zero(nz);
        for (int n = 0; n < nz; ++n)
            if (active[n]) d[n] = -ev.grad[n] / hd[n];
        if (!fr.empty()) {
            const int k = static_cast<int>(fr.size());
            Mat Hf(k, k);
            Vec gf(k);
            for (int a = 0; a < k; ++a) {
                gf[a] = ev.grad[fr[a]];
                for (int b = 0; b < k; ++b) Hf(a, b) = H(fr[a], fr[b]);
            }
            Eigen::LLT<Mat> llt(Hf);
            double shift = 0.0;
            while (llt.info() != Eigen::Success) {
                shift = shift == 0.0 ? 1e-10 * (1.0 + Hf.diagonal().cwiseAbs().maxCoeff()) : 10.0 * shift;
                llt.compute(Hf + shift * Mat::Identity(k, k));
            }
            const Vec df = -llt.solve(gf);
            for (int a = 0; a < k; ++a) d[fr[a]] = df[a];
        }
        double alpha = 1.0;
        Vec z_try;
        ZEval trial;
        bool accepted = false;
        const bool measurable = -ev.grad.dot(proj(z + d) - z) > 1e-13 * (1.0 + std::abs(ev.phi));
        for (int ls = 0; measurable && ls < 60; ++ls) {
            z_try = proj(z + alpha * d);
            trial = eval_z(P, z_try, zp, f, c_visc, P.mat.kappa);
            if (trial.phi <= ev.phi + 1e-4 * ev.grad.dot(z_try - z)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            z_try = proj(z + d);
            trial = eval_z(P, z_try, zp, f, c_visc, P.mat.kappa);
            const double w_try = (z_try - proj(z_try - trial.grad.cwiseQuotient(hd))).lpNorm<Eigen::Infinity>();
            if (w_try >= w) break;
        }
        const double step_size = (z_try - z).lpNorm<Eigen::Infinity>();
        z = z_try;
        ev = trial;
        if (step_size <= 1e-16) break;
    }
    return z;
}

}  // namespace

double incremental_functional(const Problem& P, const State& q_prev, const State& q, double t, double dt,
                              const ParamTriple& par, double tol_unidir) {
    for (int i = 0; i < q.z.size(); ++i)
        if (!(q.z[i] > 0.0)) return kInf;
    const State rate = (1.0 / dt) * (q - q_prev);
    const Extended psi = psi_eps_nu(P, q_prev.z, rate, par.eps, par.nu, tol_unidir);
    if (psi.infinite) return kInf;
    return dt * psi.value + energy(P, t, q, par.mu).total;
}

State step(const Problem& P, const State& q_prev, double t, double dt, const ParamTriple& par,
           const SolverOptions& opt, StepInfo* info) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    if (!(par.eps > 0.0) || !(par.nu > 0.0) || par.mu < 0.0)
        throw std::invalid_argument("step: need eps > 0, nu > 0, mu >= 0");
    check_domain(q_prev.z);
    if (q_prev.z.minCoeff() <= opt.z_min) throw StepError("step: previous damage already at the floor");

    State q = q_prev;
    double change = 0.0;
    int it = 0;
    for (it = 1; it <= opt.max_alt; ++it) {
        const State old = q;
        q.z = z_step(P, t, dt, par, q, q_prev.z, opt.z_min);
        up_step(P, t, dt, par, q.z, q_prev, opt.current_coefficient, q.u, q.p);
        const State d = q - old;
        const double dn = std::sqrt(d.u.squaredNorm() + d.z.squaredNorm() + d.p.squaredNorm());
        const double qn = std::sqrt(q.u.squaredNorm() + q.z.squaredNorm() + q.p.squaredNorm());
        change = dn / std::max(1.0, qn);
        if (change <= opt.tol_alt) break;
    }
    if (info) {
        info->iterations = std::min(it, opt.max_alt);
        info->last_change = change;
    }
    if (change > opt.tol_alt) throw StepError("step: alternating scheme did not converge");
    if ((q.z.array() <= opt.z_min * (1.0 + 1e-12)).any()) throw StepError("step: damage reached the z_min floor");
    return q;
}

std::vector<double> time_grid(double T, int N, int grading) {
    if (N < 1) throw std::invalid_argument("time_grid: N must be >= 1");
    if (grading < 0) throw std::invalid_argument("time_grid: grading must be >= 0");
    const double dt = T / N;
    std::vector<double> ts{0.0};
    for (int k = grading; k >= 1; --k) ts.push_back(dt * std::ldexp(1.0, -k));
    for (int k = 1; k <= N; ++k) ts.push_back(k == N ? T : k * dt);
    return ts;
}

double ViscousRun::total_residual() const {
    double s = 0.0;
    for (std::size_t k = 1; k < residuals.size(); ++k) s += std::abs(residuals[k]);
    return s;
}

double ViscousRun::energy_scale() const {
    double s = 0.0, diss = 0.0;
    for (double e : energies) s = std::max(s, std::abs(e));
    for (std::size_t k = 1; k < dissipation.size(); ++k) diss += dissipation[k];
    return std::max({s, diss, 1e-300});
}

ViscousRun solve(const Problem& P, const State& q0, const ParamTriple& par, const SolverOptions& opt) {
    if (q0.z.maxCoeff() > 1.0) throw std::invalid_argument("solve: initial damage must satisfy z0 <= 1");
    check_domain(q0.z);
    ViscousRun run;
    run.params = par;
    run.times = time_grid(P.load.T, opt.N, opt.initial_grading);
    run.states.push_back(q0);
    run.energies.push_back(energy(P, 0.0, q0, par.mu).total);
    run.residuals.push_back(0.0);
    run.dissipation.push_back(0.0);
    run.gaps.push_back(0.0);
    run.iterations.push_back(0);

    for (std::size_t k = 1; k < run.times.size(); ++k) {
        const double t0 = run.times[k - 1], t1 = run.times[k], dt = t1 - t0;
        const State& qp = run.states.back();
        State q;
        StepInfo info;
        try {
            q = step(P, qp, t1, dt, par, opt, &info);
        } catch (const std::exception& ex) {
            run.error = "step " + std::to_string(k) + " (t=" + std::to_string(t1) + "): " + ex.what();
            return run;
        }
        if ((q.z - qp.z).maxCoeff() > 1e-12) {
            run.error = "step " + std::to_string(k) + ": unidirectionality violated";
            return run;
        }
        const State rate = (1.0 / dt) * (q - qp);
        const Vec& zd = opt.current_coefficient ? q.z : qp.z;
        const Extended psi = psi_eps_nu(P, zd, rate, par.eps, par.nu, opt.tol_unidir);
        const double conj = psi_eps_nu_conj(P, t1, q, par.eps, par.mu, par.nu, &zd);
        const double e1 = energy(P, t1, q, par.mu).total;
        const double work = 0.5 * dt * (partial_t_energy(P, t0, qp) + partial_t_energy(P, t1, q));
        const double diss = dt * (psi.value + conj);
        const Extended gap = fenchel_dual_gap(P, t1, q, rate, par.eps, par.mu, par.nu, &zd, opt.tol_unidir);

        run.states.push_back(q);
        run.energies.push_back(e1);
        run.dissipation.push_back(diss);
        run.residuals.push_back(e1 - run.energies[k - 1] + diss - work);
        run.gaps.push_back(gap.infinite ? std::numeric_limits<double>::infinity() : gap.value);
        run.iterations.push_back(info.iterations);
    }
    run.complete = true;
    return run;
}

}  // namespace vf
