#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Symmetric 2x2 tensors live in the orthonormal basis
//   T = I/sqrt2,  E1 = diag(1,-1)/sqrt2,  E2 = [[0,1],[1,0]]/sqrt2
// so that xi:eta is the Euclidean product of coordinates.
// Deviatoric tensors keep the (E1, E2) coordinates only.
inline Vec3 sym_from_matrix(const Mat2& m) {
    const double s = std::sqrt(0.5);
    return {s * (m(0, 0) + m(1, 1)), s * (m(0, 0) - m(1, 1)), s * (m(0, 1) + m(1, 0))};
}

inline Mat2 matrix_from_sym(const Vec3& c) {
    const double s = std::sqrt(0.5);
    Mat2 m;
    m << s * (c[0] + c[1]), s * c[2], s * c[2], s * (c[0] - c[1]);
    return m;
}

inline Vec2 dev_part(const Vec3& c) { return {c[1], c[2]}; }
inline Vec3 embed_dev(const Vec2& d) { return {0.0, d[0], d[1]}; }

// Value of a convex functional that may be +infinity. The violation
// magnitude grades how far the argument lies outside the domain.
struct Extended {
    double value = 0.0;
    bool infinite = false;
    double violation = 0.0;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct State {
    Vec u;  // displacement, all nodal dofs, zero on Dirichlet dofs
    Vec z;  // nodal damage
    Vec p;  // cell-wise deviatoric plastic strain, 2 coordinates per cell
};

inline State operator-(const State& a, const State& b) { return {a.u - b.u, a.z - b.z, a.p - b.p}; }
inline State operator+(const State& a, const State& b) { return {a.u + b.u, a.z + b.z, a.p + b.p}; }
inline State operator*(double c, const State& a) { return {c * a.u, c * a.z, c * a.p}; }

struct ParamTriple {
    double eps = 0.1;
    double mu = 0.1;
    double nu = 0.1;
};

}  // namespace vf
