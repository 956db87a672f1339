#pragma once

#include "viscoflow/energy.hpp"

namespace vf {

struct Tolerances {
    double tol_eq = 1e-6;      // S_u, W_p, d~ classified as zero below this times max(1, max|E0|) of the curve
    double tol_rate = 1e-6;    // t' and |z'| classified as zero below this
    double tol_unidir = 1e-10; // z' entries above this make R infinite

    Tolerances scaled(double f) const { return {tol_eq * f, tol_rate * f, tol_unidir * f}; }
};

Extended calR(const Problem& P, const Vec& zdot, double tol_unidir = 1e-10);
double calH(const Problem& P, const Vec& z, const Vec& pdot);
// ||(chi + kappa)^-||, chi the nodal L2 representative of a dual damage vector
double dist_dR0(const Problem& P, const Vec& chi);
// sqrt(sum area max(|varsigma| - r(z), 0)^2), varsigma per cell
double dist_dH0(const Problem& P, const Vec& z, const Vec& varsigma);

double slope_Dnu(const Problem& P, const State& qdot, double nu);
// D(u',p') = sqrt(|u'|^2_{H1,D} + |p'|^2)
double slope_Dup(const Problem& P, const State& qdot);

// Components of the dual slopes at (t,q): S = |D_u E|_*, dz = d~(-D_z E, dR(0)),
// W = d(-D_p E_mu, K(z_diss)). z_diss defaults to q.z.
struct SlopeParts {
    double Su = 0.0;
    double dz = 0.0;
    double Wp = 0.0;
};

SlopeParts slope_parts(const Problem& P, double t, const State& q, double mu, const Vec* z_diss = nullptr);
double slope_Dstar_mu_nu(const Problem& P, double t, const State& q, double mu, double nu);
double surrogate_Su(const Problem& P, double t, const State& q);
double surrogate_Wp(const Problem& P, double t, const State& q);
double slope_Dstar0(const Problem& P, double t, const State& q);
double slope_Dstar_mu(const Problem& P, double t, const State& q, double mu);

inline double aggregate_Dstar_mu_nu(const SlopeParts& s, double nu) {
    return std::sqrt(s.Su * s.Su / nu + s.dz * s.dz + s.Wp * s.Wp / nu);
}

// Psi_eps^nu(q, q') with the dissipation coefficient z
Extended psi_eps_nu(const Problem& P, const Vec& z, const State& qdot, double eps, double nu,
                    double tol_unidir = 1e-10);
// (Psi_eps^nu)^*(q, -D E_mu(t,q)) = D*_{nu,mu}^2 / (2 eps)
double psi_eps_nu_conj(const Problem& P, double t, const State& q, double eps, double mu, double nu,
                       const Vec* z_diss = nullptr);
// <D E_mu(t,q), q'>
double pairing(const Problem& P, double t, const State& q, const State& qdot, double mu);

Extended fenchel_dual_gap(const Problem& P, double t, const State& q, const State& qdot, double eps, double mu,
                          double nu, const Vec* z_diss = nullptr, double tol_unidir = 1e-10);

}  // namespace vf
