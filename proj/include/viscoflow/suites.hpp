#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "viscoflow/oracle.hpp"

namespace vf {

struct SuiteResult {
    std::string name;
    bool pass = false;
    double value = 0.0;  // worst observed metric
    double tol = 0.0;
    double seconds = 0.0;
    std::string detail;
};

// Random admissible state: z in [z_lo, 1], u and p scaled to the loading amplitude.
State random_state(const Problem& P, std::mt19937_64& rng, double z_lo = 0.3);

// max relative error of D_u, D_z, D_p E_mu and d_t E against central differences
SuiteResult gradient_suite(const Problem& P, int samples, std::uint64_t seed, double tol);

// (C1-C3), (W1-W2), (K1-K3), (D1-D2) on random samples; value = count of failures
SuiteResult constitutive_suite(const Material& m, int samples, std::uint64_t seed);

// step() with frozen coefficients against brute_force_step on random tiny steps, (eps,mu,nu) in {1e-1,1e-2}^3, nu <= mu
SuiteResult step_oracle_suite(const Material& m, int steps, std::uint64_t seed, double tol);

// min over random (q, q') and (eps,mu,nu) of the Fenchel gap; must stay >= -tol
SuiteResult fenchel_suite(const Problem& P, int samples, std::uint64_t seed, double tol);

// Converging (t_k, q_k, t'_k, q'_k) with mu_k = 2^-k on the tiny instance:
// min_k M0_mu0 - M0_CR(limit) over the tail, must stay >= -tol
SuiteResult lsc_sequence_suite(const Material& m, int levels, std::uint64_t seed, double tol);

}  // namespace vf
