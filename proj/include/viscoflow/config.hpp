#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "viscoflow/bv_analysis.hpp"

namespace vf {

inline constexpr const char* kConfigSchema = "viscoflow.config/1";

struct GridConfig {
    int nx = 4;
    int ny = 4;
    double lx = 1.0;
    double ly = 1.0;
    std::string dirichlet = "left-right";
    std::vector<std::string> neumann;
};

struct LoadingConfig {
    std::string profile = "ramp";
    double T = 1.0;
    double speed = 1.0;
    Vec2 w_amp = Vec2(0.02, 0.0);
    Vec3 rho0 = Vec3::Zero();  // (sxx, syy, sxy)
    double safe_margin = -1.0;  // < 0: r_bar / 2
    double z0 = 1.0;
    // > 0: plastic prestrain putting |sigma_D| at (1 + unstable) r(z0) in every cell at t = 0
    double unstable = 0.0;
};

struct SolverConfig {
    SolverOptions opt;
    int samples = 0;  // 0: 4N + 1
    double time_scale = 1.0;
    Tolerances tol;
};

struct SweepConfig {
    std::string path = "JOINT";
    std::vector<double> levels{1e-1, 1e-2, 1e-3};
    double eps_final = 1e-4;
};

struct RunConfig {
    Material material;
    GridConfig grid;
    LoadingConfig loading;
    SolverConfig solver;
    ParamTriple params;
    SweepConfig sweep;
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv"};  // per-sample tables: "csv" and/or "json"
};

// Throws std::invalid_argument on schema violations, unknown keys included.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

Problem build_problem(const RunConfig& cfg);
State initial_state(const Problem& P, const RunConfig& cfg);

std::uint64_t material_hash(const Material& m);

}  // namespace vf
