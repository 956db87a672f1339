#pragma once

#include "viscoflow/types.hpp"

namespace vf {

struct Mesh;

// Default constitutive choices:
//   C(z) = (gamma1 + (gamma2-gamma1) s(z)) C_ref,  s = cubic Hermite clip of [0,1]
//   W(z) = c_w (z^-q - 1 + q(z-1))
//   K(z) = deviatoric ball of radius r(z) = r_bar + (R_bar-r_bar) clip(z,0,1)
//   R(zeta) = -kappa zeta on zeta <= 0
//   D = delta * identity
struct Material {
    double gamma1 = 1.0;
    double gamma2 = 2.0;
    double ref_trace = 1.0;  // isotropic C_ref: eigenvalue on the trace direction
    double ref_dev = 1.0;    // and on deviators
    double c_w = 1.0;
    double q_exp = 5.0;
    double r_bar = 1.0;
    double R_bar = 2.0;
    double kappa = 1.0;
    double delta = 1.0;
    double m_exp = 1.5;

    void validate() const;

    static double profile(double z);
    static double profile_d(double z);
    static double profile_dd(double z);

    double stiffness(double z) const { return gamma1 + (gamma2 - gamma1) * profile(z); }
    double stiffness_d(double z) const { return (gamma2 - gamma1) * profile_d(z); }
    double stiffness_dd(double z) const { return (gamma2 - gamma1) * profile_dd(z); }
    Vec3 ref_apply(const Vec3& xi) const { return {ref_trace * xi[0], ref_dev * xi[1], ref_dev * xi[2]}; }

    Vec3 elastic_apply(double z, const Vec3& xi) const { return stiffness(z) * ref_apply(xi); }
    Vec3 elastic_derivative(double z, const Vec3& xi) const { return stiffness_d(z) * ref_apply(xi); }

    double damage_W(double z) const;
    double damage_Wprime(double z) const;
    double damage_Wsecond(double z) const;

    double radius(double z) const;
    double C_K() const { return R_bar - r_bar; }
    double support_H(double z, const Vec2& pi) const { return radius(z) * pi.norm(); }
    Vec2 project_K(double z, const Vec2& sigma) const;
    double dist_K(double z, const Vec2& sigma) const;
    double hausdorff_K(double z1, double z2) const { return std::abs(radius(z1) - radius(z2)); }

    Extended damage_R(double zeta, double tol_unidir = 1e-10) const;

    Vec3 viscosity_apply(const Vec3& a) const { return delta * a; }
};

// Nonlocal damage matrix: midpoint double sum over ordered pairs of distinct
// cell centres of (grad z(x)-grad z(y)).(grad z(x)-grad z(y)) / |x-y|^(n+2(m-1)).
Mat assemble_Am(const Mesh& mesh, double m_exp);

}  // namespace vf
