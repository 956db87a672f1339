#include "viscoflow/bv_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace vf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-node residual of (1-l) xi + l z' + (1-l) g = 0 over xi in dR(z');
// rates within tol_rate of zero use the dR(0) branch.
double node_residual(double lam, double zp, double g, double kappa, double tol_rate) {
    const double r = (1.0 - lam) * (g - kappa) + lam * zp;
    if (zp < -tol_rate) return r;
    return std::max(r, 0.0);
}

double fit_value(double lam, const Vec& zp, const Vec& g, const Vec& mass, double kappa, double tol_rate) {
    double s = 0.0;
    for (int i = 0; i < zp.size(); ++i) {
        const double r = node_residual(lam, zp[i], g[i], kappa, tol_rate);
        s += mass[i] * r * r;
    }
    return std::sqrt(s);
}

// Boundary of {F <= level} between a point inside and a point outside.
template <class F>
double bisect_level(F&& f, double inside, double outside, double level) {
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (f(mid) <= level)
            inside = mid;
        else
            outside = mid;
    }
    return inside;
}

double trapezoid_step(const std::vector<SampleRecord>& v, std::size_t i, double a, double b) {
    return 0.5 * (v[i + 1].s - v[i].s) * (a + b);
}

// max |E0(s) - E0(s0) + int finite - int d_tE t'| / scale over [i0, M)
template <class Finite>
double cumulative_balance(const std::vector<SampleRecord>& v, std::size_t i0, Finite&& finite) {
    if (v.size() < i0 + 2) return 0.0;
    double diss = 0.0, work = 0.0, worst = 0.0, emax = 0.0;
    for (std::size_t i = i0; i < v.size(); ++i) emax = std::max(emax, std::abs(v[i].energy0));
    for (std::size_t i = i0; i + 1 < v.size(); ++i) {
        diss += trapezoid_step(v, i, finite(v[i]), finite(v[i + 1]));
        work += trapezoid_step(v, i, v[i].dtE * v[i].tp, v[i + 1].dtE * v[i + 1].tp);
        worst = std::max(worst, std::abs(v[i + 1].energy0 - v[i0].energy0 + diss - work));
    }
    const double scale = std::max({emax, diss, 1e-300});
    return worst / scale;
}

double rate_norm(const Problem& P, double tp, const State& qp) {
    const auto& S = P.space;
    return tp + S.norm_H1D(qp.u) + S.norm_Hm(qp.z) + S.norm_L2p(qp.p);
}

}  // namespace

double CurveAnalysis::max_switching() const {
    double m = 0.0;
    for (const auto& r : samples) m = std::max({m, r.sw_t_lz, r.sw_t_lup, r.sw_lup_lz});
    return m;
}

LambdaSample recover_lambda_sample(const Problem& P, const ContactInputs& in, const Vec& g_rep, const Vec& zp,
                                   double Dstar, const Tolerances& tol) {
    LambdaSample out;
    out.regime = classify(in, tol);

    const double Dup = in.Dup();
    if (Dstar <= tol.tol_eq) {
        out.lambda_tilde = 0.0;
        out.lambda_up = 0.0;
    } else if (Dup <= tol.tol_rate) {
        out.lambda_tilde = kInf;
        out.lambda_up = 1.0;
        out.up_limit = true;
    } else {
        out.lambda_tilde = Dstar / Dup;
        out.lambda_up = out.lambda_tilde / (1.0 + out.lambda_tilde);
    }

    const Vec& mass = P.space.node_mass;
    const double kappa = P.mat.kappa;
    auto F = [&](double l) { return fit_value(l, zp, g_rep, mass, kappa, tol.tol_rate); };

    double a = 0.0, b = 1.0;
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (F(m1) <= F(m2))
            b = m2;
        else
            a = m1;
    }
    double lmin = 0.5 * (a + b);
    double fmin = F(lmin);
    for (double e : {0.0, 1.0})
        if (F(e) <= fmin) {
            lmin = e;
            fmin = F(e);
        }
    const double level = fmin + tol.tol_eq;
    const double lo = F(0.0) <= level ? 0.0 : bisect_level(F, lmin, 0.0, level);
    const double hi = F(1.0) <= level ? 1.0 : bisect_level(F, lmin, 1.0, level);

    const double tp2 = in.tp * in.tp, lu2 = out.lambda_up * out.lambda_up;
    const double target = tp2 + lu2 > 0.0 ? lu2 / (tp2 + lu2) : lo;
    out.lambda_z = std::clamp(target, lo, hi);
    out.fit_residual = F(out.lambda_z);
    return out;
}

namespace {

double hill_defect(const Problem& P, double t, const State& q, const Vec& pdot, double mu) {
    const auto& S = P.space;
    const Vec gp = grad_p(P, t, q, mu);
    double pair = 0.0;
    for (int c = 0; c < S.mesh.cells(); ++c) pair -= S.cell_areas[c] * gp.segment<2>(2 * c).dot(pdot.segment<2>(2 * c));
    return std::abs(calH(P, q.z, pdot) - pair);
}

// per solver step at its closing knot when the curve comes from a run
double sample_hill(const Problem& P, const ParamTrajectory& traj, std::size_t i, double mu) {
    if (traj.knot_weights.size() != traj.size() || traj.knot_weights[i].empty())
        return hill_defect(P, traj.t[i], traj.q[i], traj.qp[i].p, mu);
    double h = 0.0;
    for (const auto& [j, w] : traj.knot_weights[i]) {
        const Vec pp = (traj.knot_q[j].p - traj.knot_q[j - 1].p) / (traj.knot_s[j] - traj.knot_s[j - 1]);
        h += w * hill_defect(P, traj.knot_t[j], traj.knot_q[j], pp, mu);
    }
    return h;
}

// |(D_u E + lt K_D u', dist(-D_p E - lt p', dH(z, p')))| / max(1, D*), lt = D*/|(u', p')|:
// the (u, p) transient system at fixed t and z
double transition_defect(const Problem& P, double t, const State& q, double tp, const State& qp, double mu,
                         const Tolerances& tol) {
    const auto& S = P.space;
    const ContactInputs in = contact_inputs(P, t, q, tp, qp, mu, tol.tol_unidir);
    if (in.Dup() <= tol.tol_rate) return 0.0;
    const double Dstar = in.Dstar_mu();
    const double lt = Dstar / in.Dup();
    const Vec gu = S.restrict_free(grad_u(P, t, q));
    const Vec ru = gu + lt * S.K_D * S.restrict_free(qp.u);
    double res = ru.dot(S.K_D_llt.solve(ru));
    const Vec gp = grad_p(P, t, q, mu);
    for (int c = 0; c < S.mesh.cells(); ++c) {
        const Vec2 pc = qp.p.segment<2>(2 * c);
        const Vec2 drive = -gp.segment<2>(2 * c) - lt * pc;
        const double rad = P.mat.radius(S.cell_z(q.z, c));
        const double d = pc.norm() > tol.tol_rate ? (drive - rad * pc / pc.norm()).norm()
                                                  : std::max(drive.norm() - rad, 0.0);
        res += S.cell_areas[c] * d * d;
    }
    return std::sqrt(res) / std::max(1.0, Dstar);
}

}  // namespace

CurveAnalysis analyze_curve(const Problem& P, const ParamTrajectory& traj, const ParamTriple& par,
                            const Tolerances& tol) {
    const auto& S = P.space;
    const std::size_t M = traj.size();
    if (traj.tp.size() != M || traj.qp.size() != M) throw std::invalid_argument("analyze_curve: rates missing");
    CurveAnalysis out;
    out.params = par;
    out.tol = tol;
    // slope tolerances are relative to the energy scale of the curve
    double escale = 1.0;
    for (std::size_t i = 0; i < M; ++i) escale = std::max(escale, std::abs(energy(P, traj.t[i], traj.q[i], 0.0).total));
    out.tol.tol_eq *= escale;
    out.samples.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        auto& r = out.samples[i];
        const double t = traj.t[i];
        const State& q = traj.q[i];
        const State& qp = traj.qp[i];
        r.s = traj.s[i];
        r.t = t;
        r.tp = traj.tp[i];
        r.energy0 = energy(P, t, q, 0.0).total;
        r.energy_mu = par.mu == 0.0 ? r.energy0 : energy(P, t, q, par.mu).total;
        r.dtE = partial_t_energy(P, t, q);
        r.in = contact_inputs(P, t, q, r.tp, qp, par.mu, out.tol.tol_unidir);
        r.Dstar = r.in.Dstar_mu();
        if (r.tp > 0.0 && par.eps > 0.0 && par.nu > 0.0) {
            const Extended m = M_eps_value(r.in, par.eps, par.nu);
            r.M_eps_finite = !m.infinite;
            r.M_eps = m.infinite ? kInf : m.value;
        } else {
            r.M_eps_finite = false;
            r.M_eps = kInf;
        }
        r.cl = M0_CL_value(r.in, out.tol);
        r.cr = M0_CR_value(r.in, out.tol);
        r.mu0 = M0_mu0_value(r.in, out.tol);
        r.munu = par.nu > 0.0 ? M0_munu_value(r.in, par.nu, out.tol) : r.mu0;

        // Each implicit step satisfies the damage flow rule at its closing knot with its own rate;
        // recover lambda_z step by step and weight like the difference quotient does.
        if (traj.knot_weights.size() == M && !traj.knot_weights[i].empty()) {
            double lz = 0.0, res = 0.0, tlz = 0.0;
            for (const auto& [j, w] : traj.knot_weights[i]) {
                const Vec g = grad_z(P, traj.knot_t[j], traj.knot_q[j]).cwiseQuotient(S.node_mass);
                const Vec zp = (traj.knot_q[j].z - traj.knot_q[j - 1].z) / (traj.knot_s[j] - traj.knot_s[j - 1]);
                const LambdaSample ls = recover_lambda_sample(P, r.in, g, zp, r.Dstar, out.tol);
                const double tpj = (traj.knot_t[j] - traj.knot_t[j - 1]) / (traj.knot_s[j] - traj.knot_s[j - 1]);
                lz += w * ls.lambda_z;
                tlz += w * std::abs(tpj * ls.lambda_z);
                res += w * ls.fit_residual;
                r.lambda = ls;
            }
            r.lambda.lambda_z = lz;
            r.lambda.fit_residual = res;
            r.sw_t_lz = tlz;
        } else {
            const Vec g = grad_z(P, t, q).cwiseQuotient(S.node_mass);
            r.lambda = recover_lambda_sample(P, r.in, g, qp.z, r.Dstar, out.tol);
            r.sw_t_lz = std::abs(r.tp * r.lambda.lambda_z);
        }
        r.sw_t_lup = std::abs(r.tp * r.lambda.lambda_up);
        r.sw_lup_lz = std::abs(r.lambda.lambda_up * (1.0 - r.lambda.lambda_z));

        r.hill = sample_hill(P, traj, i, par.mu);
    }
    for (std::size_t i = 0; i < M && M > 1; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i == M - 1 ? M - 1 : i + 1;
        auto& r = out.samples[i];
        const double d1 = -(out.samples[hi].energy_mu - out.samples[lo].energy_mu) / (traj.s[hi] - traj.s[lo]) +
                          r.dtE * r.tp;
        const double d2 = -pairing(P, traj.t[i], traj.q[i], traj.qp[i], par.mu);
        const double d3 = r.mu0.finite_part;
        r.chain_rule = std::max({std::abs(d1 - d2), std::abs(d2 - d3), std::abs(d1 - d3)});
    }
    return out;
}

std::vector<LambdaSample> recover_lambda(const CurveAnalysis& a) {
    std::vector<LambdaSample> v;
    v.reserve(a.samples.size());
    for (const auto& r : a.samples) v.push_back(r.lambda);
    return v;
}

SwitchingReport switching_residuals(const CurveAnalysis& a) {
    SwitchingReport rep;
    const auto& v = a.samples;
    for (const auto& r : v) {
        rep.max_t_lz = std::max(rep.max_t_lz, r.sw_t_lz);
        rep.max_t_lup = std::max(rep.max_t_lup, r.sw_t_lup);
        rep.max_lup_lz = std::max(rep.max_lup_lz, r.sw_lup_lz);
    }
    auto component_variation = [&](auto&& member) {
        double worst = 0.0;
        std::size_t i = 0;
        while (i < v.size()) {
            if (!member(v[i])) {
                ++i;
                continue;
            }
            double tmin = v[i].t, tmax = v[i].t;
            while (i < v.size() && member(v[i])) {
                tmin = std::min(tmin, v[i].t);
                tmax = std::max(tmax, v[i].t);
                ++i;
            }
            worst = std::max(worst, tmax - tmin);
        }
        return worst;
    };
    rep.const_t_A = component_variation([&](const SampleRecord& r) { return r.in.slopes0.dz > a.tol.tol_eq; });
    rep.const_t_B = component_variation([&](const SampleRecord& r) { return r.Dstar > a.tol.tol_eq; });
    return rep;
}

std::vector<double> chain_rule_residual(const Problem& P, const ParamTrajectory& traj, const ParamTriple& par) {
    const CurveAnalysis a = analyze_curve(P, traj, par);
    std::vector<double> v;
    v.reserve(a.samples.size());
    for (const auto& r : a.samples) v.push_back(r.chain_rule);
    return v;
}

StructureReport structure_detect(const Problem& P, const ParamTrajectory& traj, const CurveAnalysis& a,
                                 double tol_var, double tol_bv) {
    const auto& v = a.samples;
    const std::size_t M = v.size();
    StructureReport rep;
    if (M == 0) throw std::invalid_argument("structure_detect: empty curve");

    std::size_t idx = M;
    while (idx > 0 && v[idx - 1].Dstar <= a.tol.tol_eq) --idx;
    rep.s_star_index = idx;
    rep.empty = idx == M;
    rep.s_star = rep.empty ? traj.S : v[idx].s;
    rep.transient = idx > 0;

    for (std::size_t i = 0; i < idx; ++i) {
        if (v[i].Dstar <= a.tol.tol_eq) ++rep.isolated_members;
        rep.var_t = std::max(rep.var_t, std::abs(v[i].t - v[0].t));
        rep.var_z = std::max(rep.var_z, (traj.q[i].z - traj.q[0].z).lpNorm<Eigen::Infinity>());
        double res = 0.0;
        if (traj.knot_weights.size() == M && !traj.knot_weights[i].empty()) {
            for (const auto& [j, w] : traj.knot_weights[i]) {
                const double ds = traj.knot_s[j] - traj.knot_s[j - 1];
                const double tpj = (traj.knot_t[j] - traj.knot_t[j - 1]) / ds;
                const State qpj = (1.0 / ds) * (traj.knot_q[j] - traj.knot_q[j - 1]);
                res += w * transition_defect(P, traj.knot_t[j], traj.knot_q[j], tpj, qpj, a.params.mu, a.tol);
            }
        } else {
            res = transition_defect(P, v[i].t, traj.q[i], v[i].tp, traj.qp[i], a.params.mu, a.tol);
        }
        rep.transition_residual = std::max(rep.transition_residual, res);
    }
    rep.verdict_a = !rep.transient ||
                    (rep.var_t <= tol_var && rep.var_z <= tol_var && rep.transition_residual <= tol_bv);

    if (!rep.empty) {
        double viol = 0.0;
        for (std::size_t i = idx; i < M; ++i) viol = std::max(viol, v[i].cl.max_violation());
        const double bal = cumulative_balance(v, idx, [](const SampleRecord& r) { return r.cl.finite_part; });
        rep.bv_residual = std::max(viol, bal);
        rep.verdict_b = rep.bv_residual <= tol_bv;
    } else {
        rep.verdict_b = false;
    }
    return rep;
}

std::vector<double> hill_duality_check(const Problem& P, const ParamTrajectory& traj, double mu) {
    std::vector<double> v(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) v[i] = sample_hill(P, traj, i, mu);
    return v;
}

double m0cr_balance_residual(const CurveAnalysis& a) {
    return cumulative_balance(a.samples, 0, [](const SampleRecord& r) { return r.cr.finite_part; });
}

SweepPath parse_path(const std::string& s) {
    if (s == "EPS_FIRST") return SweepPath::EpsFirst;
    if (s == "EPSNU_FIRST") return SweepPath::EpsNuFirst;
    if (s == "JOINT") return SweepPath::Joint;
    throw std::invalid_argument("unknown sweep path '" + s + "'");
}

std::string to_string(SweepPath p) {
    switch (p) {
        case SweepPath::EpsFirst: return "EPS_FIRST";
        case SweepPath::EpsNuFirst: return "EPSNU_FIRST";
        case SweepPath::Joint: return "JOINT";
    }
    return "?";
}

std::vector<ParamTriple> sweep_points(SweepPath path, const std::vector<double>& levels, double eps_final) {
    if (levels.empty()) throw std::invalid_argument("sweep: empty level grid");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!(levels[k] > 0.0)) throw std::invalid_argument("sweep: levels must be positive");
        if (k > 0 && !(levels[k] < levels[k - 1])) throw std::invalid_argument("sweep: levels must decrease");
    }
    if (path != SweepPath::Joint && !(eps_final > 0.0 && eps_final < levels.back()))
        throw std::invalid_argument("sweep: eps_final must lie below the finest level");
    const double l0 = levels.front();
    std::vector<ParamTriple> pts;
    switch (path) {
        case SweepPath::Joint:
            for (double l : levels) pts.push_back({l, l, l});
            break;
        case SweepPath::EpsFirst:
            for (double l : levels) pts.push_back({l, l0, l0});
            pts.push_back({eps_final, l0, l0});
            for (std::size_t k = 1; k < levels.size(); ++k) pts.push_back({eps_final, levels[k], levels[k]});
            break;
        case SweepPath::EpsNuFirst:
            for (double l : levels) pts.push_back({l, l0, l});
            pts.push_back({eps_final, l0, eps_final});
            for (std::size_t k = 1; k < levels.size(); ++k) pts.push_back({eps_final, levels[k], eps_final});
            break;
    }
    return pts;
}

SweepResult limit_sweep(const Problem& P, const State& q0, const SolverOptions& opt, SweepPath path,
                        const std::vector<double>& levels, double eps_final, const Tolerances& tol, int workers,
                        int samples) {
    const auto pts = sweep_points(path, levels, eps_final);
    struct Item {
        SweepPoint point;
        ParamTrajectory traj;
        CurveAnalysis analysis;
    };
    auto run_one = [&](const ParamTriple& par) {
        Item it;
        it.point.params = par;
        const ViscousRun run = solve(P, q0, par, opt);
        if (!run.complete) {
            it.point.error = run.error;
            return it;
        }
        try {
            it.traj = reparameterize(P, run, samples);
            it.analysis = analyze_curve(P, it.traj, par, tol);
        } catch (const std::exception& e) {
            it.point.error = e.what();
            return it;
        }
        it.point.ok = true;
        it.point.S = it.traj.S;
        it.point.viscous_residual = std::abs(run.total_residual()) / std::max(run.energy_scale(), 1e-300);
        it.point.cr_balance = m0cr_balance_residual(it.analysis);
        it.point.switching = it.analysis.max_switching();
        for (std::size_t i = 0; i < it.traj.size(); ++i) {
            it.point.cr_violation = std::max(it.point.cr_violation, it.analysis.samples[i].cr.max_violation());
            it.point.rate_bound = std::max(it.point.rate_bound, rate_norm(P, it.traj.tp[i], it.traj.qp[i]));
        }
        return it;
    };

    std::vector<Item> items(pts.size());
    const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
    for (std::size_t b = 0; b < pts.size(); b += w) {
        std::vector<std::future<Item>> fut;
        for (std::size_t k = b; k < std::min(pts.size(), b + w); ++k)
            fut.push_back(std::async(w > 1 ? std::launch::async : std::launch::deferred, run_one, pts[k]));
        for (std::size_t k = 0; k < fut.size(); ++k) items[b + k] = fut[k].get();
    }

    SweepResult res;
    res.path = path;
    const Item* prev = nullptr;
    const Item* last = nullptr;
    for (auto& it : items) {
        if (it.point.ok) {
            if (prev) it.point.cauchy = curve_distance(P, it.traj, prev->traj);
            prev = &it;
            last = &it;
        }
        res.points.push_back(it.point);
    }
    if (last) {
        res.terminal = last->traj;
        res.terminal_analysis = last->analysis;
    }
    return res;
}

}  // namespace vf
