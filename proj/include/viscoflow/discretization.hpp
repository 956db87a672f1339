#pragma once

#include <array>
#include <string>
#include <vector>

#include "viscoflow/material.hpp"
#include "viscoflow/types.hpp"

namespace vf {

struct Mesh {
    int nx = 4;
    int ny = 4;
    double lx = 1.0;
    double ly = 1.0;

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    int nodes() const { return (nx + 1) * (ny + 1); }
    int cells() const { return nx * ny; }
    int node(int i, int j) const { return j * (nx + 1) + i; }
    int cell(int i, int j) const { return j * nx + i; }
    double cell_area() const { return hx() * hy(); }
    // counter-clockwise from the lower-left corner
    std::array<int, 4> cell_nodes(int c) const;
    Vec2 cell_center(int c) const;
    Vec2 node_coord(int n) const;
    // gradient of the bilinear basis at the cell centre, rows x and y
    Eigen::Matrix<double, 2, 4> center_gradients() const;
};

enum class Dirichlet { Left, LeftRight };

Dirichlet parse_dirichlet(const std::string& s);
std::string to_string(Dirichlet d);

struct DiscreteSpace {
    Mesh mesh;
    Dirichlet dirichlet = Dirichlet::Left;
    std::vector<std::string> neumann;  // edges carrying traction: "right", "top", "bottom", "left"
    std::vector<int> dirichlet_nodes;
    std::vector<int> free_dofs;
    std::vector<char> fixed;  // per displacement dof

    Mat B;            // 3*cells x 2*nodes, one-point strain in the orthonormal basis
    Vec cell_areas;   // per cell
    Vec node_mass;    // lumped nodal mass for z
    Mat K_D;          // delta * B^T diag(area) B on free dofs (free x free)
    Eigen::LLT<Mat> K_D_llt;
    Mat Am;           // nonlocal damage matrix, nodes x nodes

    int n_u() const { return 2 * mesh.nodes(); }
    int n_z() const { return mesh.nodes(); }
    int n_p() const { return 2 * mesh.cells(); }
    int n_free() const { return static_cast<int>(free_dofs.size()); }

    Vec strain(const Vec& u) const { return B * u; }
    // B^T (area * sigma), sigma given per cell in the orthonormal basis
    Vec div_T(const Vec& sigma) const;
    Vec restrict_free(const Vec& full) const;
    Vec extend_free(const Vec& reduced) const;
    Vec zero_fixed(const Vec& full) const;
    double cell_z(const Vec& z, int c) const;
    Vec cell_values(const Vec& z) const;
    Vec strain_dev_embed(const Vec& p) const;

    double norm_H1D(const Vec& u) const;
    double norm_H1D_dual(const Vec& eta) const;  // eta a full dual vector; fixed entries ignored
    double norm_L2u(const Vec& u) const;
    double norm_L2z(const Vec& z) const;
    double norm_L2p(const Vec& p) const;
    double norm_Hm(const Vec& z) const;
};

DiscreteSpace build_space(const Mesh& mesh, Dirichlet dirichlet, const std::vector<std::string>& neumann,
                          const Material& mat);
DiscreteSpace build_space(const Mesh& mesh, Dirichlet dirichlet, const std::vector<std::string>& neumann,
                          const Material& mat, const Mat& Am);

// Consistent nodal load of a uniform body force f and a uniform traction g on
// the listed edges (one-point edge quadrature, half per end node).
Vec total_load(const DiscreteSpace& space, const Vec2& f, const Vec2& g, const std::vector<std::string>& edges);

enum class Profile { Ramp, Static };

Profile parse_profile(const std::string& s);
std::string to_string(Profile p);

// w(t) = a(t) w0, rho(t) = a(t) rho0, F(t) := B^T(area rho(t)) on free dofs.
struct Loading {
    Profile profile = Profile::Ramp;
    double speed = 1.0;
    double T = 1.0;
    Vec w0;      // nodal lift, nonzero only on Dirichlet nodes
    Vec rho0;    // per cell, orthonormal basis
    Vec F0;      // = zero_fixed(div_T(rho0))

    double a(double t) const { return profile == Profile::Static ? 1.0 : speed * t; }
    double a_dot(double) const { return profile == Profile::Static ? 0.0 : speed; }
    Vec w(double t) const { return a(t) * w0; }
    Vec w_dot(double t) const { return a_dot(t) * w0; }
    Vec F(double t) const { return a(t) * F0; }
    Vec F_dot(double t) const { return a_dot(t) * F0; }
    Vec rho(double t) const { return a(t) * rho0; }
};

// Rejects safe loads whose deviatoric part exceeds r_bar - alpha for
// the largest |a(t)| on [0,T]; alpha defaults to r_bar/2.
Loading make_loading(const DiscreteSpace& space, const Material& mat, Profile profile, double speed, double T,
                     const Vec2& w_amp, const Vec3& rho0, double alpha);

struct Problem {
    Material mat;
    DiscreteSpace space;
    Loading load;
};

State zero_state(const DiscreteSpace& space, double z0);

}  // namespace vf
