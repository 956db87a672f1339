#pragma once

#include "viscoflow/discretization.hpp"

namespace vf {

struct EnergyValue {
    double total = 0.0;
    double elastic = 0.0;
    double damage_potential = 0.0;
    double hardening = 0.0;
    double nonlocal = 0.0;
    double load = 0.0;
};

// Per-cell kinematics: e = B(u+w(t)) - p, sigma = C(z_cell) e.
struct Fields {
    Vec zc;
    Vec e;
    Vec sigma;
};

Fields fields(const Problem& P, double t, const State& q);

EnergyValue energy(const Problem& P, double t, const State& q, double mu);
// B^T(area sigma) - F(t), zero on Dirichlet dofs
Vec grad_u(const Problem& P, double t, const State& q, double mu = 0.0);
// A_m z + M_z (W'(z) + 1/2 C'(z)e:e), as a nodal dual vector
Vec grad_z(const Problem& P, double t, const State& q, double mu = 0.0);
// mu p - sigma_D per cell (L2 representative; the dual vector is area-weighted)
Vec grad_p(const Problem& P, double t, const State& q, double mu);
double partial_t_energy(const Problem& P, double t, const State& q);

// Hessian of the energy in z for fixed (u,p); used by the damage step.
Mat hess_z(const Problem& P, const Vec& z, const Fields& f);

void check_domain(const Vec& z);

}  // namespace vf
