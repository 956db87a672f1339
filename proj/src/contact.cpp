#include "viscoflow/contact.hpp"

#include <algorithm>
#include <limits>

namespace vf {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::RateIndependent: return "RATE_INDEPENDENT";
        case Regime::ViscousZ: return "VISCOUS_Z";
        case Regime::ViscousUP: return "VISCOUS_UP";
        case Regime::Static: return "STATIC";
    }
    return "?";
}

double ContactValue::max_violation() const {
    double m = 0.0;
    for (const auto& v : violations) m = std::max(m, v.magnitude);
    return m;
}

ContactInputs contact_inputs(const Problem& P, double t, const State& q, double tp, const State& qp, double mu,
                             double tol_unidir) {
    const auto& S = P.space;
    ContactInputs in;
    in.tp = tp;
    in.R = calR(P, qp.z, tol_unidir);
    in.H = calH(P, q.z, qp.p);
    in.u_norm = S.norm_H1D(qp.u);
    in.z_norm = S.norm_L2z(qp.z);
    in.p_norm = S.norm_L2p(qp.p);
    in.slopes0 = slope_parts(P, t, q, 0.0);
    in.slopes_mu = in.slopes0;
    if (mu != 0.0) in.slopes_mu.Wp = dist_dH0(P, q.z, -grad_p(P, t, q, mu));
    return in;
}

Regime classify(const ContactInputs& in, const Tolerances& tol) {
    if (in.tp > tol.tol_rate) return Regime::RateIndependent;
    if (in.z_norm > tol.tol_rate) return Regime::ViscousZ;
    if (in.Dup() > tol.tol_rate) return Regime::ViscousUP;
    return Regime::Static;
}

double M_eps_formula(double RH, double eps, double tp, double Dnu, double Dstar) {
    if (!(tp > 0.0)) throw std::invalid_argument("M_eps: t' must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("M_eps: eps must be positive");
    return RH + eps / (2.0 * tp) * Dnu * Dnu + tp / (2.0 * eps) * Dstar * Dstar;
}

Extended M_eps_value(const ContactInputs& in, double eps, double nu) {
    Extended out;
    if (in.R.infinite) {
        out.infinite = true;
        out.violation = in.R.violation;
        return out;
    }
    out.value = M_eps_formula(in.R.value + in.H, eps, in.tp, in.Dnu(nu), in.Dstar_mu_nu(nu));
    return out;
}

namespace {

void add(ContactValue& cv, const char* name, double mag, double tol) {
    if (mag > tol) cv.violations.push_back({name, mag});
}

ContactValue base(const ContactInputs& in, const Tolerances& tol) {
    ContactValue cv;
    cv.regime = classify(in, tol);
    cv.finite_part = in.R.infinite ? 0.0 : in.R.value + in.H;
    if (in.R.infinite) cv.violations.push_back({"unidirectionality", in.R.violation});
    return cv;
}

void rate_independent_constraints(ContactValue& cv, const SlopeParts& s, const Tolerances& tol) {
    add(cv, "S_u>0 at t'>0", s.Su, tol.tol_eq);
    add(cv, "d~>0 at t'>0", s.dz, tol.tol_eq);
    add(cv, "W_p>0 at t'>0", s.Wp, tol.tol_eq);
}

}  // namespace

ContactValue M0_CL_value(const ContactInputs& in, const Tolerances& tol) {
    ContactValue cv = base(in, tol);
    cv.finite_part += in.z_norm * in.slopes0.dz;
    add(cv, "D*>0", in.Dstar0(), tol.tol_eq);
    if (in.tp > tol.tol_rate) add(cv, "d~>0 at t'>0", in.slopes0.dz, tol.tol_eq);
    return cv;
}

ContactValue M0_CR_value(const ContactInputs& in, const Tolerances& tol) {
    ContactValue cv = base(in, tol);
    const double dstar = in.Dstar0();
    cv.finite_part += in.Dup() * dstar + in.z_norm * in.slopes0.dz;
    if (in.tp > tol.tol_rate) {
        rate_independent_constraints(cv, in.slopes0, tol);
    } else if (in.z_norm > tol.tol_rate && dstar > tol.tol_eq) {
        cv.violations.push_back({"z'!=0 and D*>0", in.z_norm * dstar});
    }
    return cv;
}

ContactValue M0_mu0_value(const ContactInputs& in, const Tolerances& tol) {
    ContactValue cv = base(in, tol);
    const double dstar = in.Dstar_mu();
    cv.finite_part += in.Dup() * dstar + in.z_norm * in.slopes_mu.dz;
    if (in.tp > tol.tol_rate) {
        rate_independent_constraints(cv, in.slopes_mu, tol);
    } else if (in.z_norm > tol.tol_rate && dstar > tol.tol_eq) {
        cv.violations.push_back({"z'!=0 and D*>0", in.z_norm * dstar});
    }
    return cv;
}

ContactValue M0_munu_value(const ContactInputs& in, double nu, const Tolerances& tol) {
    ContactValue cv = base(in, tol);
    cv.finite_part += in.Dnu(nu) * in.Dstar_mu_nu(nu);
    if (in.tp > tol.tol_rate) rate_independent_constraints(cv, in.slopes_mu, tol);
    return cv;
}

Extended M_eps(const Problem& P, double t, const State& q, double tp, const State& qp, double eps, double mu,
               double nu) {
    return M_eps_value(contact_inputs(P, t, q, tp, qp, mu), eps, nu);
}

ContactValue M0_CL(const Problem& P, double t, const State& q, double tp, const State& qp, const Tolerances& tol) {
    return M0_CL_value(contact_inputs(P, t, q, tp, qp, 0.0, tol.tol_unidir), tol);
}

ContactValue M0_CR(const Problem& P, double t, const State& q, double tp, const State& qp, const Tolerances& tol) {
    return M0_CR_value(contact_inputs(P, t, q, tp, qp, 0.0, tol.tol_unidir), tol);
}

ContactValue M0_mu0(const Problem& P, double t, const State& q, double tp, const State& qp, double mu,
                    const Tolerances& tol) {
    return M0_mu0_value(contact_inputs(P, t, q, tp, qp, mu, tol.tol_unidir), tol);
}

ContactValue M0_munu(const Problem& P, double t, const State& q, double tp, const State& qp, double mu, double nu,
                     const Tolerances& tol) {
    return M0_munu_value(contact_inputs(P, t, q, tp, qp, mu, tol.tol_unidir), nu, tol);
}

}  // namespace vf
