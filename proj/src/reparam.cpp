#include "viscoflow/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "viscoflow/contact.hpp"

namespace vf {

namespace {

State lerp(const State& a, const State& b, double th) { return a + th * (b - a); }

}  // namespace

ParamTrajectory reparameterize(const Problem& P, const ViscousRun& run, int samples, double time_scale) {
    const auto& S = P.space;
    const std::size_t K = run.times.size();
    if (K < 2) throw std::invalid_argument("reparameterize: run has no steps");
    if (!(time_scale > 0.0)) throw std::invalid_argument("reparameterize: time_scale must be positive");

    std::vector<double> knots(K, 0.0);
    for (std::size_t k = 1; k < K; ++k) {
        const State d = run.states[k] - run.states[k - 1];
        knots[k] = knots[k - 1] + time_scale * (run.times[k] - run.times[k - 1]) + S.norm_H1D(d.u) +
                   S.norm_Hm(d.z) + S.norm_L2p(d.p);
    }
    ParamTrajectory tr;
    tr.params = run.params;
    tr.time_scale = time_scale;
    tr.S = knots.back();
    if (!(tr.S > 0.0)) throw std::invalid_argument("reparameterize: degenerate run (S = 0)");

    const int M = samples > 1 ? samples : static_cast<int>(4 * (K - 1) + 1);
    tr.s.resize(M);
    tr.t.resize(M);
    tr.q.resize(M);
    std::size_t k = 1;
    for (int i = 0; i < M; ++i) {
        const double si = i == M - 1 ? tr.S : tr.S * i / (M - 1);
        while (k < K - 1 && knots[k] < si) ++k;
        const double len = knots[k] - knots[k - 1];
        const double th = std::clamp((si - knots[k - 1]) / len, 0.0, 1.0);
        tr.s[i] = si;
        tr.t[i] = run.times[k - 1] + th * (run.times[k] - run.times[k - 1]);
        tr.q[i] = lerp(run.states[k - 1], run.states[k], th);
    }
    discrete_rates(tr);

    tr.knot_s = knots;
    tr.knot_t = run.times;
    tr.knot_q = run.states;
    tr.knot_weights.resize(M);
    std::size_t first = 1;
    for (int i = 0; i < M; ++i) {
        const double a = tr.s[i == 0 ? 0 : i - 1], b = tr.s[i == M - 1 ? M - 1 : i + 1];
        while (first < K - 1 && knots[first] <= a) ++first;
        for (std::size_t j = first; j < K && knots[j - 1] < b; ++j) {
            const double w = (std::min(b, knots[j]) - std::max(a, knots[j - 1])) / (b - a);
            if (w > 0.0) tr.knot_weights[i].emplace_back(j, w);
        }
    }
    return tr;
}

void discrete_rates(ParamTrajectory& tr) {
    const std::size_t M = tr.size();
    if (M < 2) throw std::invalid_argument("discrete_rates: need at least two samples");
    tr.tp.assign(M, 0.0);
    tr.qp.assign(M, State{});
    for (std::size_t i = 0; i < M; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i == M - 1 ? M - 1 : i + 1;
        const double ds = tr.s[hi] - tr.s[lo];
        tr.tp[i] = (tr.t[hi] - tr.t[lo]) / ds;
        tr.qp[i] = (1.0 / ds) * (tr.q[hi] - tr.q[lo]);
    }
}

double kinematic_residual(const Problem& P, const ParamTrajectory& tr) {
    const auto& S = P.space;
    const std::size_t M = tr.size();
    std::vector<Vec> e(M);
    for (std::size_t i = 0; i < M; ++i)
        e[i] = S.strain(tr.q[i].u + P.load.w(tr.t[i])) - S.strain_dev_embed(tr.q[i].p);
    double worst = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i == M - 1 ? M - 1 : i + 1;
        const Vec ep = (e[hi] - e[lo]) / (tr.s[hi] - tr.s[lo]);
        const Vec rhs = S.strain(tr.qp[i].u) + S.strain(P.load.w_dot(tr.t[i])) * tr.tp[i] -
                        S.strain_dev_embed(tr.qp[i].p);
        worst = std::max(worst, (ep - rhs).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

std::vector<double> reparam_balance_residual(const Problem& P, const ParamTrajectory& tr, const ParamTriple& par) {
    const std::size_t M = tr.size();
    std::vector<double> E(M), Mv(M), dt(M);
    for (std::size_t i = 0; i < M; ++i) {
        E[i] = energy(P, tr.t[i], tr.q[i], par.mu).total;
        const Extended m = M_eps(P, tr.t[i], tr.q[i], tr.tp[i], tr.qp[i], par.eps, par.mu, par.nu);
        Mv[i] = m.infinite ? std::numeric_limits<double>::infinity() : m.value;
        dt[i] = partial_t_energy(P, tr.t[i], tr.q[i]) * tr.tp[i];
    }
    std::vector<double> res(M > 0 ? M - 1 : 0);
    for (std::size_t i = 0; i + 1 < M; ++i) {
        const double h = tr.s[i + 1] - tr.s[i];
        res[i] = E[i + 1] - E[i] + 0.5 * h * (Mv[i] + Mv[i + 1]) - 0.5 * h * (dt[i] + dt[i + 1]);
    }
    return res;
}

void sample_at(const ParamTrajectory& tr, double f, double& t, State& q) {
    const std::size_t M = tr.size();
    const double x = std::clamp(f, 0.0, 1.0) * (M - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::floor(x)), M - 2);
    const double th = x - static_cast<double>(i);
    t = tr.t[i] + th * (tr.t[i + 1] - tr.t[i]);
    q = lerp(tr.q[i], tr.q[i + 1], th);
}

double curve_distance(const Problem& P, const ParamTrajectory& a, const ParamTrajectory& b) {
    const auto& S = P.space;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = a.size() > 1 ? static_cast<double>(i) / (a.size() - 1) : 0.0;
        double tb;
        State qb;
        sample_at(b, f, tb, qb);
        const State d = a.q[i] - qb;
        const double dist = std::abs(a.time_scale * a.t[i] - b.time_scale * tb) + S.norm_H1D(d.u) + S.norm_Hm(d.z) +
                            S.norm_L2p(d.p);
        worst = std::max(worst, dist);
    }
    return worst;
}

}  // namespace vf
