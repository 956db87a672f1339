#pragma once

#include <vector>

#include "viscoflow/viscous_solver.hpp"

namespace vf {

struct ParamTrajectory {
    ParamTriple params;
    double S = 0.0;
    double time_scale = 1.0;  // t entering the arclength is time_scale * t
    std::vector<double> s;
    std::vector<double> t;
    std::vector<State> q;
    std::vector<double> tp;   // rates in s, filled by discrete_rates
    std::vector<State> qp;
    // Solver knots and, per sample, the overlap weights of its difference window with each step
    // (keyed by the step's closing knot). Empty unless built from a run.
    std::vector<double> knot_s;
    std::vector<double> knot_t;
    std::vector<State> knot_q;
    std::vector<std::vector<std::pair<std::size_t, double>>> knot_weights;

    std::size_t size() const { return s.size(); }
};

// s(t) = time_scale t + sum (|du|_{H1,D} + |dz|_{Hm} + |dp|_{L2}), resampled
// uniformly in s with piecewise-linear interpolation. samples = 0 picks 4N+1.
ParamTrajectory reparameterize(const Problem& P, const ViscousRun& run, int samples = 0, double time_scale = 1.0);

// Central differences in s, one-sided at the ends.
void discrete_rates(ParamTrajectory& traj);

// max over samples of |e' - (B u' + B w_dot t' - p')|, e' by the same differences
double kinematic_residual(const Problem& P, const ParamTrajectory& traj);

// Trapezoidal residual of the reparameterized balance on every interval, with M_eps.
std::vector<double> reparam_balance_residual(const Problem& P, const ParamTrajectory& traj, const ParamTriple& par);

// Linear interpolation at the fraction f in [0,1] of the s-range.
void sample_at(const ParamTrajectory& traj, double f, double& t, State& q);

// Sup over the samples of a of |dt| + |du|_{H1,D} + |dz|_{Hm} + |dp|_{L2}
// at matched fractions of s (times scaled by time_scale).
double curve_distance(const Problem& P, const ParamTrajectory& a, const ParamTrajectory& b);

}  // namespace vf
