#include "viscoflow/dissipation.hpp"

#include <algorithm>

namespace vf {

Extended calR(const Problem& P, const Vec& zdot, double tol_unidir) {
    Extended out;
    const auto& m = P.space.node_mass;
    double viol = 0.0;
    for (int i = 0; i < zdot.size(); ++i) {
        const Extended r = P.mat.damage_R(zdot[i], tol_unidir);
        if (r.infinite) {
            out.infinite = true;
            viol = std::max(viol, r.violation);
        } else {
            out.value += m[i] * r.value;
        }
    }
    if (out.infinite) {
        out.value = 0.0;
        out.violation = viol;
    }
    return out;
}

double calH(const Problem& P, const Vec& z, const Vec& pdot) {
    const auto& S = P.space;
    double h = 0.0;
    for (int c = 0; c < S.mesh.cells(); ++c)
        h += S.cell_areas[c] * P.mat.support_H(S.cell_z(z, c), pdot.segment<2>(2 * c));
    return h;
}

double dist_dR0(const Problem& P, const Vec& chi) {
    double s = 0.0;
    for (int i = 0; i < chi.size(); ++i) {
        const double neg = std::min(chi[i] + P.mat.kappa, 0.0);
        s += P.space.node_mass[i] * neg * neg;
    }
    return std::sqrt(s);
}

double dist_dH0(const Problem& P, const Vec& z, const Vec& varsigma) {
    const auto& S = P.space;
    double s = 0.0;
    for (int c = 0; c < S.mesh.cells(); ++c) {
        const double d = P.mat.dist_K(S.cell_z(z, c), varsigma.segment<2>(2 * c));
        s += S.cell_areas[c] * d * d;
    }
    return std::sqrt(s);
}

double slope_Dnu(const Problem& P, const State& qdot, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("slope_Dnu: nu must be positive");
    const auto& S = P.space;
    const double a = S.norm_H1D(qdot.u), b = S.norm_L2z(qdot.z), c = S.norm_L2p(qdot.p);
    return std::sqrt(nu * a * a + b * b + nu * c * c);
}

double slope_Dup(const Problem& P, const State& qdot) {
    const double a = P.space.norm_H1D(qdot.u), c = P.space.norm_L2p(qdot.p);
    return std::sqrt(a * a + c * c);
}

SlopeParts slope_parts(const Problem& P, double t, const State& q, double mu, const Vec* z_diss) {
    const auto& S = P.space;
    SlopeParts out;
    out.Su = S.norm_H1D_dual(grad_u(P, t, q));
    const Vec gz = grad_z(P, t, q);
    const Vec chi = -gz.cwiseQuotient(S.node_mass);
    out.dz = dist_dR0(P, chi);
    out.Wp = dist_dH0(P, z_diss ? *z_diss : q.z, -grad_p(P, t, q, mu));
    return out;
}

double slope_Dstar_mu_nu(const Problem& P, double t, const State& q, double mu, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("slope_Dstar_mu_nu: nu must be positive");
    return aggregate_Dstar_mu_nu(slope_parts(P, t, q, mu), nu);
}

double surrogate_Su(const Problem& P, double t, const State& q) { return P.space.norm_H1D_dual(grad_u(P, t, q)); }

double surrogate_Wp(const Problem& P, double t, const State& q) {
    return dist_dH0(P, q.z, -grad_p(P, t, q, 0.0));
}

double slope_Dstar0(const Problem& P, double t, const State& q) { return slope_Dstar_mu(P, t, q, 0.0); }

double slope_Dstar_mu(const Problem& P, double t, const State& q, double mu) {
    const double su = surrogate_Su(P, t, q);
    const double wp = dist_dH0(P, q.z, -grad_p(P, t, q, mu));
    return std::sqrt(su * su + wp * wp);
}

Extended psi_eps_nu(const Problem& P, const Vec& z, const State& qdot, double eps, double nu, double tol_unidir) {
    const auto& S = P.space;
    Extended out = calR(P, qdot.z, tol_unidir);
    if (out.infinite) return out;
    const double u = S.norm_H1D(qdot.u), zz = S.norm_L2z(qdot.z), p = S.norm_L2p(qdot.p);
    out.value += 0.5 * eps * nu * u * u + 0.5 * eps * zz * zz + calH(P, z, qdot.p) + 0.5 * eps * nu * p * p;
    return out;
}

double psi_eps_nu_conj(const Problem& P, double t, const State& q, double eps, double mu, double nu,
                       const Vec* z_diss) {
    const SlopeParts s = slope_parts(P, t, q, mu, z_diss);
    const double d = aggregate_Dstar_mu_nu(s, nu);
    return d * d / (2.0 * eps);
}

double pairing(const Problem& P, double t, const State& q, const State& qdot, double mu) {
    const auto& S = P.space;
    double v = grad_u(P, t, q).dot(qdot.u) + grad_z(P, t, q).dot(qdot.z);
    const Vec gp = grad_p(P, t, q, mu);
    for (int c = 0; c < S.mesh.cells(); ++c)
        v += S.cell_areas[c] * gp.segment<2>(2 * c).dot(qdot.p.segment<2>(2 * c));
    return v;
}

Extended fenchel_dual_gap(const Problem& P, double t, const State& q, const State& qdot, double eps, double mu,
                          double nu, const Vec* z_diss, double tol_unidir) {
    const Vec& zd = z_diss ? *z_diss : q.z;
    Extended out = psi_eps_nu(P, zd, qdot, eps, nu, tol_unidir);
    if (out.infinite) return out;
    out.value += psi_eps_nu_conj(P, t, q, eps, mu, nu, &zd) + pairing(P, t, q, qdot, mu);
    return out;
}

}  // namespace vf
