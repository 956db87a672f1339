#pragma once

#include <string>
#include <vector>

#include "viscoflow/bv_analysis.hpp"

namespace vf {

std::string fmt_double(double v);  // %.17g, "inf"/"-inf"/"nan" spelled out

const std::vector<std::string>& trajectory_columns();

// One row per sample, columns in trajectory_columns() order.
std::string trajectory_csv(const CurveAnalysis& a);
// {"columns": [...], "rows": [[...], ...]}, non-finite values as null
std::string trajectory_json(const CurveAnalysis& a);
// One row per solver knot: step, t, E_mu, residual, gap, then u, z, p coordinates.
std::string states_csv(const ViscousRun& run);
// Inverse of states_csv for the given space.
ViscousRun parse_states_csv(const std::string& text, const DiscreteSpace& space);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace vf
