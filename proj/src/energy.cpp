#include "viscoflow/energy.hpp"

namespace vf {

void check_domain(const Vec& z) {
    for (int i = 0; i < z.size(); ++i)
        if (!(z[i] > 0.0)) throw DomainError("energy: damage must be positive at every node");
}

Fields fields(const Problem& P, double t, const State& q) {
    const auto& S = P.space;
    const int nc = S.mesh.cells();
    Fields f;
    f.zc = S.cell_values(q.z);
    f.e = S.strain(q.u + P.load.w(t)) - S.strain_dev_embed(q.p);
    f.sigma.resize(3 * nc);
    for (int c = 0; c < nc; ++c) f.sigma.segment<3>(3 * c) = P.mat.elastic_apply(f.zc[c], f.e.segment<3>(3 * c));
    return f;
}

EnergyValue energy(const Problem& P, double t, const State& q, double mu) {
    check_domain(q.z);
    const auto& S = P.space;
    const Fields f = fields(P, t, q);
    EnergyValue E;
    for (int c = 0; c < S.mesh.cells(); ++c) {
        E.elastic += 0.5 * S.cell_areas[c] * f.e.segment<3>(3 * c).dot(f.sigma.segment<3>(3 * c));
        E.hardening += 0.5 * mu * S.cell_areas[c] * q.p.segment<2>(2 * c).squaredNorm();
    }
    for (int n = 0; n < S.n_z(); ++n) E.damage_potential += S.node_mass[n] * P.mat.damage_W(q.z[n]);
    E.nonlocal = 0.5 * q.z.dot(S.Am * q.z);
    E.load = -P.load.F(t).dot(q.u + P.load.w(t));
    E.total = E.elastic + E.damage_potential + E.hardening + E.nonlocal + E.load;
    return E;
}

Vec grad_u(const Problem& P, double t, const State& q, double) {
    const Fields f = fields(P, t, q);
    return P.space.zero_fixed(P.space.div_T(f.sigma) - P.load.F(t));
}

Vec grad_z(const Problem& P, double t, const State& q, double) {
    check_domain(q.z);
    const auto& S = P.space;
    const Fields f = fields(P, t, q);
    Vec g = S.Am * q.z;
    for (int n = 0; n < S.n_z(); ++n) g[n] += S.node_mass[n] * P.mat.damage_Wprime(q.z[n]);
    for (int c = 0; c < S.mesh.cells(); ++c) {
        const Vec3 e = f.e.segment<3>(3 * c);
        const double h = 0.5 * e.dot(P.mat.elastic_derivative(f.zc[c], e));
        for (int n : S.mesh.cell_nodes(c)) g[n] += 0.25 * S.cell_areas[c] * h;
    }
    return g;
}

Vec grad_p(const Problem& P, double t, const State& q, double mu) {
    const Fields f = fields(P, t, q);
    const int nc = P.space.mesh.cells();
    Vec g(2 * nc);
    for (int c = 0; c < nc; ++c) g.segment<2>(2 * c) = mu * q.p.segment<2>(2 * c) - f.sigma.segment<2>(3 * c + 1);
    return g;
}

double partial_t_energy(const Problem& P, double t, const State& q) {
    const auto& S = P.space;
    const Fields f = fields(P, t, q);
    const Vec wdot = P.load.w_dot(t);
    const Vec Bwdot = S.strain(wdot);
    double val = 0.0;
    for (int c = 0; c < S.mesh.cells(); ++c)
        val += S.cell_areas[c] * f.sigma.segment<3>(3 * c).dot(Bwdot.segment<3>(3 * c));
    val -= P.load.F(t).dot(wdot);
    val -= P.load.F_dot(t).dot(q.u + P.load.w(t));
    return val;
}

Mat hess_z(const Problem& P, const Vec& z, const Fields& f) {
    const auto& S = P.space;
    Mat H = S.Am;
    for (int n = 0; n < S.n_z(); ++n) H(n, n) += S.node_mass[n] * P.mat.damage_Wsecond(z[n]);
    for (int c = 0; c < S.mesh.cells(); ++c) {
        const Vec3 e = f.e.segment<3>(3 * c);
        const double h = 0.5 * P.mat.stiffness_dd(f.zc[c]) * e.dot(P.mat.ref_apply(e));
        const double w = S.cell_areas[c] * h / 16.0;
        for (int a : S.mesh.cell_nodes(c))
            for (int b : S.mesh.cell_nodes(c)) H(a, b) += w;
    }
    return H;
}

}  // namespace vf
