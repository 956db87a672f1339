#pragma once

#include <string>
#include <vector>

#include "viscoflow/dissipation.hpp"

namespace vf {

enum class Regime { RateIndependent, ViscousZ, ViscousUP, Static };

std::string to_string(Regime r);

struct Violation {
    std::string name;
    double magnitude = 0.0;
};

// Finite part plus graded violations standing in for the indicator terms.
struct ContactValue {
    double finite_part = 0.0;
    std::vector<Violation> violations;
    Regime regime = Regime::Static;

    bool finite() const { return violations.empty(); }
    double max_violation() const;
};

// Everything the contact potentials need at one (t, q, t', q').
struct ContactInputs {
    double tp = 0.0;
    Extended R;
    double H = 0.0;
    double u_norm = 0.0;  // |u'|_{H1,D}
    double z_norm = 0.0;  // |z'|_{L2}
    double p_norm = 0.0;  // |p'|_{L2}
    SlopeParts slopes0;   // from E_0
    SlopeParts slopes_mu; // from E_mu (only W_p differs)

    double Dup() const { return std::sqrt(u_norm * u_norm + p_norm * p_norm); }
    double Dnu(double nu) const {
        return std::sqrt(nu * u_norm * u_norm + z_norm * z_norm + nu * p_norm * p_norm);
    }
    double Dstar0() const { return std::hypot(slopes0.Su, slopes0.Wp); }
    double Dstar_mu() const { return std::hypot(slopes_mu.Su, slopes_mu.Wp); }
    double Dstar_mu_nu(double nu) const { return aggregate_Dstar_mu_nu(slopes_mu, nu); }
};

ContactInputs contact_inputs(const Problem& P, double t, const State& q, double tp, const State& qp, double mu,
                             double tol_unidir = 1e-10);

Regime classify(const ContactInputs& in, const Tolerances& tol);

// R + H + (eps/2t') Dnu^2 + (t'/2eps) Dstar^2
double M_eps_formula(double RH, double eps, double tp, double Dnu, double Dstar);
Extended M_eps_value(const ContactInputs& in, double eps, double nu);
ContactValue M0_CL_value(const ContactInputs& in, const Tolerances& tol);
ContactValue M0_CR_value(const ContactInputs& in, const Tolerances& tol);
ContactValue M0_mu0_value(const ContactInputs& in, const Tolerances& tol);
ContactValue M0_munu_value(const ContactInputs& in, double nu, const Tolerances& tol);

Extended M_eps(const Problem& P, double t, const State& q, double tp, const State& qp, double eps, double mu,
               double nu);
ContactValue M0_CL(const Problem& P, double t, const State& q, double tp, const State& qp,
                   const Tolerances& tol = {});
ContactValue M0_CR(const Problem& P, double t, const State& q, double tp, const State& qp,
                   const Tolerances& tol = {});
ContactValue M0_mu0(const Problem& P, double t, const State& q, double tp, const State& qp, double mu,
                    const Tolerances& tol = {});
ContactValue M0_munu(const Problem& P, double t, const State& q, double tp, const State& qp, double mu, double nu,
                     const Tolerances& tol = {});

}  // namespace vf
