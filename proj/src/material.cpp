#include "viscoflow/material.hpp"

#include <algorithm>
#include <cmath>

#include "viscoflow/discretization.hpp"

namespace vf {

void Material::validate() const {
    if (!(gamma1 > 0.0) || !(gamma2 >= gamma1)) throw std::invalid_argument("material: need 0 < gamma1 <= gamma2");
    if (!(ref_trace > 0.0) || !(ref_dev > 0.0)) throw std::invalid_argument("material: C_ref must be positive");
    if (!(c_w > 0.0)) throw std::invalid_argument("material: c_w must be positive");
    if (!(q_exp > 4.0)) throw std::invalid_argument("material: q_exp must exceed 2n = 4");
    if (!(r_bar > 0.0) || !(R_bar >= r_bar)) throw std::invalid_argument("material: need 0 < r_bar <= R_bar");
    if (!(kappa > 0.0)) throw std::invalid_argument("material: kappa must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("material: delta must be positive");
    if (!(m_exp > 1.0)) throw std::invalid_argument("material: m_exp must exceed n/2 = 1");
}

double Material::profile(double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    return z * z * (3.0 - 2.0 * z);
}

double Material::profile_d(double z) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    return 6.0 * z * (1.0 - z);
}

double Material::profile_dd(double z) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    return 6.0 - 12.0 * z;
}

double Material::damage_W(double z) const {
    if (!(z > 0.0)) throw DomainError("damage_W: z must be positive");
    return c_w * (std::pow(z, -q_exp) - 1.0 + q_exp * (z - 1.0));
}

double Material::damage_Wprime(double z) const {
    if (!(z > 0.0)) throw DomainError("damage_Wprime: z must be positive");
    return c_w * q_exp * (1.0 - std::pow(z, -q_exp - 1.0));
}

double Material::damage_Wsecond(double z) const {
    if (!(z > 0.0)) throw DomainError("damage_Wsecond: z must be positive");
    return c_w * q_exp * (q_exp + 1.0) * std::pow(z, -q_exp - 2.0);
}

double Material::radius(double z) const { return r_bar + (R_bar - r_bar) * std::clamp(z, 0.0, 1.0); }

Vec2 Material::project_K(double z, const Vec2& sigma) const {
    const double r = radius(z);
    const double n = sigma.norm();
    if (n <= r) return sigma;
    return (r / n) * sigma;
}

double Material::dist_K(double z, const Vec2& sigma) const { return std::max(sigma.norm() - radius(z), 0.0); }

Extended Material::damage_R(double zeta, double tol_unidir) const {
    Extended out;
    if (zeta > tol_unidir) {
        out.infinite = true;
        out.violation = zeta;
        return out;
    }
    out.value = kappa * std::max(-zeta, 0.0);
    return out;
}

Mat assemble_Am(const Mesh& mesh, double m_exp) {
    if (!(m_exp > 1.0)) throw std::invalid_argument("assemble_Am: m_exp must exceed n/2 = 1");
    const int nn = mesh.nodes();
    const int nc = mesh.cells();
    const double power = 2.0 + 2.0 * (m_exp - 1.0);
    const double area = mesh.cell_area();
    const auto g = mesh.center_gradients();

    // G_c maps nodal z to the centre gradient of cell c
    std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> G(nc);
    for (int c = 0; c < nc; ++c) {
        G[c] = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, nn);
        const auto nodes = mesh.cell_nodes(c);
        for (int a = 0; a < 4; ++a) G[c].col(nodes[a]) = g.col(a);
    }

    Mat A = Mat::Zero(nn, nn);
    for (int c = 0; c < nc; ++c) {
        for (int d = 0; d < nc; ++d) {
            if (c == d) continue;
            const double dist = (mesh.cell_center(c) - mesh.cell_center(d)).norm();
            const double w = area * area / std::pow(dist, power);
            const auto D = G[c] - G[d];
            A.noalias() += w * D.transpose() * D;
        }
    }
    return 0.5 * (A + A.transpose());
}

}  // namespace vf
