#include "viscoflow/discretization.hpp"

#include <algorithm>
#include <cmath>

namespace vf {

std::array<int, 4> Mesh::cell_nodes(int c) const {
    const int i = c % nx;
    const int j = c / nx;
    return {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
}

Vec2 Mesh::cell_center(int c) const {
    const int i = c % nx;
    const int j = c / nx;
    return {(i + 0.5) * hx(), (j + 0.5) * hy()};
}

Vec2 Mesh::node_coord(int n) const {
    const int i = n % (nx + 1);
    const int j = n / (nx + 1);
    return {i * hx(), j * hy()};
}

Eigen::Matrix<double, 2, 4> Mesh::center_gradients() const {
    Eigen::Matrix<double, 2, 4> g;
    const double ax = 0.5 / hx();
    const double ay = 0.5 / hy();
    g << -ax, ax, ax, -ax,
         -ay, -ay, ay, ay;
    return g;
}

Dirichlet parse_dirichlet(const std::string& s) {
    if (s == "left") return Dirichlet::Left;
    if (s == "left-right") return Dirichlet::LeftRight;
    throw std::invalid_argument("grid.dirichlet must be \"left\" or \"left-right\", got \"" + s + "\"");
}

std::string to_string(Dirichlet d) { return d == Dirichlet::Left ? "left" : "left-right"; }

Profile parse_profile(const std::string& s) {
    if (s == "ramp") return Profile::Ramp;
    if (s == "static") return Profile::Static;
    throw std::invalid_argument("loading.profile must be \"ramp\" or \"static\", got \"" + s + "\"");
}

std::string to_string(Profile p) { return p == Profile::Ramp ? "ramp" : "static"; }

Vec DiscreteSpace::div_T(const Vec& sigma) const {
    Vec weighted = sigma;
    for (int c = 0; c < mesh.cells(); ++c) weighted.segment<3>(3 * c) *= cell_areas[c];
    return B.transpose() * weighted;
}

Vec DiscreteSpace::restrict_free(const Vec& full) const {
    Vec r(n_free());
    for (int k = 0; k < n_free(); ++k) r[k] = full[free_dofs[k]];
    return r;
}

Vec DiscreteSpace::extend_free(const Vec& reduced) const {
    Vec f = Vec::Zero(n_u());
    for (int k = 0; k < n_free(); ++k) f[free_dofs[k]] = reduced[k];
    return f;
}

Vec DiscreteSpace::zero_fixed(const Vec& full) const {
    Vec f = full;
    for (int d = 0; d < n_u(); ++d)
        if (fixed[d]) f[d] = 0.0;
    return f;
}

double DiscreteSpace::cell_z(const Vec& z, int c) const {
    const auto n = mesh.cell_nodes(c);
    return 0.25 * (z[n[0]] + z[n[1]] + z[n[2]] + z[n[3]]);
}

Vec DiscreteSpace::cell_values(const Vec& z) const {
    Vec zc(mesh.cells());
    for (int c = 0; c < mesh.cells(); ++c) zc[c] = cell_z(z, c);
    return zc;
}

Vec DiscreteSpace::strain_dev_embed(const Vec& p) const {
    Vec out = Vec::Zero(3 * mesh.cells());
    for (int c = 0; c < mesh.cells(); ++c) out.segment<2>(3 * c + 1) = p.segment<2>(2 * c);
    return out;
}

double DiscreteSpace::norm_H1D(const Vec& u) const {
    const Vec uf = restrict_free(u);
    return std::sqrt(std::max(uf.dot(K_D * uf), 0.0));
}

double DiscreteSpace::norm_H1D_dual(const Vec& eta) const {
    const Vec ef = restrict_free(eta);
    return std::sqrt(std::max(ef.dot(K_D_llt.solve(ef)), 0.0));
}

double DiscreteSpace::norm_L2u(const Vec& u) const {
    double s = 0.0;
    for (int n = 0; n < mesh.nodes(); ++n) s += node_mass[n] * (u[2 * n] * u[2 * n] + u[2 * n + 1] * u[2 * n + 1]);
    return std::sqrt(s);
}

double DiscreteSpace::norm_L2z(const Vec& z) const {
    return std::sqrt(z.cwiseProduct(z).dot(node_mass));
}

double DiscreteSpace::norm_L2p(const Vec& p) const {
    double s = 0.0;
    for (int c = 0; c < mesh.cells(); ++c) s += cell_areas[c] * p.segment<2>(2 * c).squaredNorm();
    return std::sqrt(s);
}

double DiscreteSpace::norm_Hm(const Vec& z) const {
    const double l2 = z.cwiseProduct(z).dot(node_mass);
    return std::sqrt(l2 + std::max(z.dot(Am * z), 0.0));
}

DiscreteSpace build_space(const Mesh& mesh, Dirichlet dirichlet, const std::vector<std::string>& neumann,
                          const Material& mat) {
    return build_space(mesh, dirichlet, neumann, mat, assemble_Am(mesh, mat.m_exp));
}

DiscreteSpace build_space(const Mesh& mesh, Dirichlet dirichlet, const std::vector<std::string>& neumann,
                          const Material& mat, const Mat& Am) {
    if (mesh.nx < 1 || mesh.ny < 1) throw std::invalid_argument("grid: nx, ny must be >= 1");
    if (!(mesh.lx > 0.0) || !(mesh.ly > 0.0)) throw std::invalid_argument("grid: lx, ly must be positive");
    for (const auto& e : neumann) {
        if (e != "left" && e != "right" && e != "top" && e != "bottom")
            throw std::invalid_argument("grid.neumann: unknown edge \"" + e + "\"");
        if (e == "left" || (e == "right" && dirichlet == Dirichlet::LeftRight))
            throw std::invalid_argument("grid.neumann: edge \"" + e + "\" is a Dirichlet edge");
    }

    DiscreteSpace s;
    s.mesh = mesh;
    s.dirichlet = dirichlet;
    s.neumann = neumann;
    const int nn = mesh.nodes();
    const int nc = mesh.cells();

    s.fixed.assign(2 * nn, 0);
    for (int j = 0; j <= mesh.ny; ++j) {
        s.dirichlet_nodes.push_back(mesh.node(0, j));
        if (dirichlet == Dirichlet::LeftRight) s.dirichlet_nodes.push_back(mesh.node(mesh.nx, j));
    }
    std::sort(s.dirichlet_nodes.begin(), s.dirichlet_nodes.end());
    for (int n : s.dirichlet_nodes) s.fixed[2 * n] = s.fixed[2 * n + 1] = 1;
    for (int d = 0; d < 2 * nn; ++d)
        if (!s.fixed[d]) s.free_dofs.push_back(d);

    s.cell_areas = Vec::Constant(nc, mesh.cell_area());
    s.node_mass = Vec::Zero(nn);
    for (int c = 0; c < nc; ++c)
        for (int n : mesh.cell_nodes(c)) s.node_mass[n] += 0.25 * s.cell_areas[c];

    const double r = std::sqrt(0.5);
    const auto g = mesh.center_gradients();
    s.B = Mat::Zero(3 * nc, 2 * nn);
    for (int c = 0; c < nc; ++c) {
        const auto nodes = mesh.cell_nodes(c);
        for (int a = 0; a < 4; ++a) {
            const int ux = 2 * nodes[a];
            const int uy = ux + 1;
            const double gx = g(0, a);
            const double gy = g(1, a);
            s.B(3 * c + 0, ux) = r * gx;
            s.B(3 * c + 0, uy) = r * gy;
            s.B(3 * c + 1, ux) = r * gx;
            s.B(3 * c + 1, uy) = -r * gy;
            s.B(3 * c + 2, ux) = r * gy;
            s.B(3 * c + 2, uy) = r * gx;
        }
    }

    Vec w3(3 * nc);
    for (int c = 0; c < nc; ++c) w3.segment<3>(3 * c).setConstant(s.cell_areas[c]);
    const Mat K_full = mat.delta * s.B.transpose() * w3.asDiagonal() * s.B;
    const int nf = s.n_free();
    s.K_D.resize(nf, nf);
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) s.K_D(a, b) = K_full(s.free_dofs[a], s.free_dofs[b]);
    s.K_D_llt.compute(s.K_D);
    if (nf == 0 || s.K_D_llt.info() != Eigen::Success)
        throw std::invalid_argument("discretization: viscous stiffness is singular on the free dofs");

    if (Am.rows() != nn || Am.cols() != nn) throw std::invalid_argument("discretization: A_m has the wrong size");
    if ((Am - Am.transpose()).norm() > 1e-12 * (1.0 + Am.norm()))
        throw std::invalid_argument("discretization: A_m must be symmetric");
    s.Am = Am;
    return s;
}

Vec total_load(const DiscreteSpace& space, const Vec2& f, const Vec2& g, const std::vector<std::string>& edges) {
    const Mesh& m = space.mesh;
    Vec F = Vec::Zero(space.n_u());
    for (int n = 0; n < m.nodes(); ++n) F.segment<2>(2 * n) += space.node_mass[n] * f;
    auto add_edge = [&](int n0, int n1, double len) {
        F.segment<2>(2 * n0) += 0.5 * len * g;
        F.segment<2>(2 * n1) += 0.5 * len * g;
    };
    for (const auto& e : edges) {
        if (e == "bottom" || e == "top") {
            const int j = e == "bottom" ? 0 : m.ny;
            for (int i = 0; i < m.nx; ++i) add_edge(m.node(i, j), m.node(i + 1, j), m.hx());
        } else if (e == "left" || e == "right") {
            const int i = e == "left" ? 0 : m.nx;
            for (int j = 0; j < m.ny; ++j) add_edge(m.node(i, j), m.node(i, j + 1), m.hy());
        } else {
            throw std::invalid_argument("total_load: unknown edge \"" + e + "\"");
        }
    }
    return F;
}

Loading make_loading(const DiscreteSpace& space, const Material& mat, Profile profile, double speed, double T,
                     const Vec2& w_amp, const Vec3& rho0, double alpha) {
    if (!(T > 0.0)) throw std::invalid_argument("loading.T must be positive");
    if (!(speed > 0.0)) throw std::invalid_argument("loading.speed must be positive");
    if (alpha < 0.0) alpha = 0.5 * mat.r_bar;
    if (!(alpha > 0.0) || alpha >= mat.r_bar) throw std::invalid_argument("loading.safe_margin must lie in (0, r_bar)");

    Loading L;
    L.profile = profile;
    L.speed = speed;
    L.T = T;

    const Mesh& m = space.mesh;
    L.w0 = Vec::Zero(space.n_u());
    if (space.dirichlet == Dirichlet::LeftRight) {
        for (int j = 0; j <= m.ny; ++j) L.w0.segment<2>(2 * m.node(m.nx, j)) = w_amp;
    } else if (w_amp.norm() > 0.0) {
        throw std::invalid_argument("loading.w_amp must vanish when only the left edge is clamped");
    }

    Mat2 rm;
    rm << rho0[0], rho0[2], rho0[2], rho0[1];
    const Vec3 rc = sym_from_matrix(rm);
    const double amax = profile == Profile::Static ? 1.0 : speed * T;
    if (dev_part(rc).norm() * amax > mat.r_bar - alpha + 1e-14)
        throw std::invalid_argument("loading.rho0: deviatoric part violates the safe-load margin");
    L.rho0 = Vec(3 * m.cells());
    for (int c = 0; c < m.cells(); ++c) L.rho0.segment<3>(3 * c) = rc;
    L.F0 = space.zero_fixed(space.div_T(L.rho0));
    return L;
}

State zero_state(const DiscreteSpace& space, double z0) {
    return {Vec::Zero(space.n_u()), Vec::Constant(space.n_z(), z0), Vec::Zero(space.n_p())};
}

}  // namespace vf
