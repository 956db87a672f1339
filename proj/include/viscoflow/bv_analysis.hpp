#pragma once

#include <string>
#include <vector>

#include "viscoflow/contact.hpp"
#include "viscoflow/reparam.hpp"

namespace vf {

struct LambdaSample {
    double lambda_z = 0.0;
    double lambda_up = 0.0;
    double lambda_tilde = 0.0;
    double fit_residual = 0.0;  // residual of the lambda_z least-squares fit
    bool up_limit = false;      // D(u',p') vanished while D* did not
    Regime regime = Regime::Static;
};

// Per-sample record of a parameterized curve. Slopes are hardening-aware
// (computed from E_mu with the curve's mu); mu = 0 gives the E_0 quantities.
struct SampleRecord {
    double s = 0.0, t = 0.0, tp = 0.0;
    double energy0 = 0.0, energy_mu = 0.0, dtE = 0.0;
    ContactInputs in;
    double Dstar = 0.0;  // sqrt(S_u^2 + W_p^2) from E_mu
    double M_eps = 0.0;
    bool M_eps_finite = true;
    ContactValue cl, cr, mu0, munu;
    LambdaSample lambda;
    double sw_t_lz = 0.0, sw_t_lup = 0.0, sw_lup_lz = 0.0;
    double hill = 0.0;
    double chain_rule = 0.0;
};

struct CurveAnalysis {
    ParamTriple params;
    Tolerances tol;
    std::vector<SampleRecord> samples;
    double max_switching() const;
};

// Least-squares lambda_z for (1-l) dR(z') + l z' + (1-l) g  contains 0 with g the
// nodal representative of D_z E. Ties are resolved towards the switching
// relations using t' and lambda_up.
LambdaSample recover_lambda_sample(const Problem& P, const ContactInputs& in, const Vec& g_rep, const Vec& zp,
                                   double Dstar, const Tolerances& tol);

CurveAnalysis analyze_curve(const Problem& P, const ParamTrajectory& traj, const ParamTriple& par,
                            const Tolerances& tol = {});

std::vector<LambdaSample> recover_lambda(const CurveAnalysis& a);

struct SwitchingReport {
    double max_t_lz = 0.0, max_t_lup = 0.0, max_lup_lz = 0.0;
    double const_t_A = 0.0;  // largest variation of t on a component of {d~ > tol}
    double const_t_B = 0.0;  // and of {D* > tol}
};
SwitchingReport switching_residuals(const CurveAnalysis& a);

// |(i) - (ii)|, |(ii) - (iii)|, |(i) - (iii)| maximised; (i) = -dE/ds + d_tE t',
// (ii) = -<D_q E, q'>, (iii) the hardening-aware contact value.
std::vector<double> chain_rule_residual(const Problem& P, const ParamTrajectory& traj, const ParamTriple& par);

struct StructureReport {
    std::size_t s_star_index = 0;
    double s_star = 0.0;
    bool transient = false;
    bool empty = false;
    std::size_t isolated_members = 0;  // members of the set before s_*
    double var_t = 0.0;
    double var_z = 0.0;
    double transition_residual = 0.0;  // (u,p) viscous system on [0, s_*)
    double bv_residual = 0.0;          // characterisation residuals on [s_*, S]
    bool verdict_a = true;
    bool verdict_b = true;
};

StructureReport structure_detect(const Problem& P, const ParamTrajectory& traj, const CurveAnalysis& a,
                                 double tol_var, double tol_bv);

// |H(z,p') - <sigma_D - mu p, p'>| per sample
std::vector<double> hill_duality_check(const Problem& P, const ParamTrajectory& traj, double mu);

// Cumulative balance residual with the graded M0_CR finite part, relative to the energy scale.
double m0cr_balance_residual(const CurveAnalysis& a);

enum class SweepPath { EpsFirst, EpsNuFirst, Joint };
SweepPath parse_path(const std::string& s);
std::string to_string(SweepPath p);

std::vector<ParamTriple> sweep_points(SweepPath path, const std::vector<double>& levels, double eps_final);

struct SweepPoint {
    ParamTriple params;
    bool ok = false;
    std::string error;
    double S = 0.0;
    double cauchy = 0.0;          // distance to the previous curve (s rescaled to [0,1])
    double cr_violation = 0.0;    // largest M0_CR violation on the curve
    double cr_balance = 0.0;      // m0cr_balance_residual
    double rate_bound = 0.0;      // max t' + |u'| + |z'| + |p'|
    double switching = 0.0;
    double viscous_residual = 0.0;  // time-domain balance residual / energy scale
};

struct SweepResult {
    SweepPath path;
    std::vector<SweepPoint> points;
    ParamTrajectory terminal;
    CurveAnalysis terminal_analysis;
};

SweepResult limit_sweep(const Problem& P, const State& q0, const SolverOptions& opt, SweepPath path,
                        const std::vector<double>& levels, double eps_final, const Tolerances& tol, int workers = 1,
                        int samples = 0);

}  // namespace vf
