#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "viscoflow/reparam.hpp"

namespace vf {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

// nx=2, ny=1, both ends clamped: 4 free displacement dofs, 6 damage nodes,
// 4 plastic coordinates.
Problem tiny_problem(const Material& mat, double w_amp = 0.05, double speed = 1.0, double T = 1.0);

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h);

struct OracleOptions {
    int grid_points = 9;
    int rounds = 3;
    double initial_span = 0.05;
    double polish_tol = 1e-10;
    int max_polish = 200000;
    double fd_step = 1e-6;
    double z_min = 1e-3;
};

// Independent minimiser of the incremental functional: coordinate grid search
// around q_prev, then accelerated proximal-gradient polish (finite-difference
// gradients, exact prox for the plastic support function, clip for z).
State brute_force_step(const Problem& P, const State& q_prev, double t, double dt, const ParamTriple& par,
                       const OracleOptions& opt = {});

enum class JumpKind { ViscousZ, ViscousUP };

struct ManufacturedJump {
    ParamTrajectory traj;
    std::vector<double> lambda_z;   // planted
    std::vector<double> lambda_up;  // planted
};

// Curve at frozen t0 solving the planted lambda-system by RK4 with dense
// sub-stepping. ViscousZ: lambda_z(s) = 1/2 + 1/4 sin(pi s/S), (u,p) frozen.
// ViscousUP: lambda~ = 1 (lambda_up = 1/2), z frozen.
ManufacturedJump manufactured_jump(const Problem& P, const State& q0, double t0, JumpKind kind, double mu,
                                   double S = 1.0, int samples = 101, int substeps = 64);

}  // namespace vf
