#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "viscoflow/dissipation.hpp"

namespace vf {

struct SolverOptions {
    int N = 200;
    double tol_alt = 1e-10;
    int max_alt = 10000;
    double z_min = 1e-3;
    int initial_grading = 0;  // geometric refinement levels inside the first interval
    double tol_unidir = 1e-10;
    // false: plastic radius frozen at r(z_prev) (a convex incremental minimisation);
    // true: radius r(z) at the current iterate, an implicit Euler step of the inclusion system
    bool current_coefficient = false;
};

struct StepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepInfo {
    int iterations = 0;
    double last_change = 0.0;
};

// dt Psi_eps^nu(q_prev, (q-q_prev)/dt) + E_mu(t,q), dissipation coefficients at z_prev.
// +inf when q leaves the domain or violates z <= z_prev.
double incremental_functional(const Problem& P, const State& q_prev, const State& q, double t, double dt,
                              const ParamTriple& par, double tol_unidir = 1e-10);

State step(const Problem& P, const State& q_prev, double t, double dt, const ParamTriple& par,
           const SolverOptions& opt = {}, StepInfo* info = nullptr);

struct ViscousRun {
    ParamTriple params;
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> energies;   // E_mu(t_k, q_k)
    std::vector<double> residuals;  // signed balance residual of step k (entry 0 unused)
    std::vector<double> dissipation;  // dt (Psi + Psi*) of step k
    std::vector<double> gaps;       // Fenchel gap at the converged rate of step k
    std::vector<int> iterations;
    bool complete = false;
    std::string error;

    double total_residual() const;
    double energy_scale() const;
};

std::vector<double> time_grid(double T, int N, int grading);

ViscousRun solve(const Problem& P, const State& q0, const ParamTriple& par, const SolverOptions& opt = {});

}  // namespace vf
