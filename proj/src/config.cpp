#include "viscoflow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vf {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& block, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument(block + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw std::invalid_argument(block + ": unknown key '" + it.key() + "'");
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& block) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(block + "." + key + ": wrong type");
    }
}

template <int N>
void get_vec(const json& j, const char* key, Eigen::Matrix<double, N, 1>& out, const std::string& block) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != N)
        throw std::invalid_argument(block + "." + key + ": expected " + std::to_string(N) + " numbers");
    for (int i = 0; i < N; ++i) {
        if (!a[i].is_number()) throw std::invalid_argument(block + "." + key + ": expected numbers");
        out[i] = a[i].get<double>();
    }
}

void positive(double v, const std::string& name) {
    if (!(v > 0.0)) throw std::invalid_argument(name + " must be positive");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(root, "config", {"schema", "material", "grid", "loading", "solver", "params", "sweep", "output"});
    if (!root.contains("schema") || root["schema"] != kConfigSchema)
        throw std::invalid_argument(std::string("config.schema must be \"") + kConfigSchema + "\"");

    RunConfig c;
    if (root.contains("material")) {
        const auto& j = root["material"];
        const std::string b = "material";
        check_keys(j, b, {"gamma1", "gamma2", "ref_trace", "ref_dev", "c_w", "q_exp", "r_bar", "R_bar", "kappa", "delta",
                          "m_exp"});
        auto& m = c.material;
        get(j, "gamma1", m.gamma1, b);
        get(j, "gamma2", m.gamma2, b);
        get(j, "ref_trace", m.ref_trace, b);
        get(j, "ref_dev", m.ref_dev, b);
        get(j, "c_w", m.c_w, b);
        get(j, "q_exp", m.q_exp, b);
        get(j, "r_bar", m.r_bar, b);
        get(j, "R_bar", m.R_bar, b);
        get(j, "kappa", m.kappa, b);
        get(j, "delta", m.delta, b);
        get(j, "m_exp", m.m_exp, b);
    }
    c.material.validate();

    if (root.contains("grid")) {
        const auto& j = root["grid"];
        const std::string b = "grid";
        check_keys(j, b, {"nx", "ny", "lx", "ly", "dirichlet", "neumann"});
        get(j, "nx", c.grid.nx, b);
        get(j, "ny", c.grid.ny, b);
        get(j, "lx", c.grid.lx, b);
        get(j, "ly", c.grid.ly, b);
        get(j, "dirichlet", c.grid.dirichlet, b);
        get(j, "neumann", c.grid.neumann, b);
    }
    if (c.grid.nx < 1 || c.grid.ny < 1) throw std::invalid_argument("grid.nx and grid.ny must be >= 1");
    positive(c.grid.lx, "grid.lx");
    positive(c.grid.ly, "grid.ly");
    parse_dirichlet(c.grid.dirichlet);

    if (root.contains("loading")) {
        const auto& j = root["loading"];
        const std::string b = "loading";
        check_keys(j, b, {"profile", "T", "speed", "w_amp", "rho0", "safe_margin", "z0", "unstable"});
        get(j, "profile", c.loading.profile, b);
        get(j, "T", c.loading.T, b);
        get(j, "speed", c.loading.speed, b);
        get_vec<2>(j, "w_amp", c.loading.w_amp, b);
        get_vec<3>(j, "rho0", c.loading.rho0, b);
        get(j, "safe_margin", c.loading.safe_margin, b);
        get(j, "z0", c.loading.z0, b);
        get(j, "unstable", c.loading.unstable, b);
    }
    parse_profile(c.loading.profile);
    positive(c.loading.T, "loading.T");
    positive(c.loading.speed, "loading.speed");
    if (!(c.loading.z0 > 0.0 && c.loading.z0 <= 1.0)) throw std::invalid_argument("loading.z0 must lie in (0,1]");
    if (c.loading.unstable < 0.0) throw std::invalid_argument("loading.unstable must be >= 0");

    if (root.contains("solver")) {
        const auto& j = root["solver"];
        const std::string b = "solver";
        check_keys(j, b, {"N", "tol_alt", "max_alt", "z_min", "initial_grading", "tol_unidir", "samples",
                          "time_scale", "tol_eq", "tol_rate", "current_coefficient"});
        auto& o = c.solver.opt;
        get(j, "N", o.N, b);
        get(j, "tol_alt", o.tol_alt, b);
        get(j, "max_alt", o.max_alt, b);
        get(j, "z_min", o.z_min, b);
        get(j, "initial_grading", o.initial_grading, b);
        get(j, "tol_unidir", o.tol_unidir, b);
        get(j, "current_coefficient", o.current_coefficient, b);
        get(j, "samples", c.solver.samples, b);
        get(j, "time_scale", c.solver.time_scale, b);
        get(j, "tol_eq", c.solver.tol.tol_eq, b);
        get(j, "tol_rate", c.solver.tol.tol_rate, b);
        c.solver.tol.tol_unidir = o.tol_unidir;
    }
    {
        const auto& o = c.solver.opt;
        if (o.N < 1) throw std::invalid_argument("solver.N must be >= 1");
        if (o.max_alt < 1) throw std::invalid_argument("solver.max_alt must be >= 1");
        if (o.initial_grading < 0) throw std::invalid_argument("solver.initial_grading must be >= 0");
        if (c.solver.samples < 0 || c.solver.samples == 1) throw std::invalid_argument("solver.samples must be 0 or >= 2");
        positive(o.tol_alt, "solver.tol_alt");
        positive(o.z_min, "solver.z_min");
        positive(o.tol_unidir, "solver.tol_unidir");
        positive(c.solver.time_scale, "solver.time_scale");
        positive(c.solver.tol.tol_eq, "solver.tol_eq");
        positive(c.solver.tol.tol_rate, "solver.tol_rate");
    }

    if (root.contains("params")) {
        const auto& j = root["params"];
        const std::string b = "params";
        check_keys(j, b, {"eps", "mu", "nu"});
        get(j, "eps", c.params.eps, b);
        get(j, "mu", c.params.mu, b);
        get(j, "nu", c.params.nu, b);
    }
    positive(c.params.eps, "params.eps");
    positive(c.params.nu, "params.nu");
    if (c.params.mu < 0.0) throw std::invalid_argument("params.mu must be >= 0");
    if (c.params.nu > c.params.mu) throw std::invalid_argument("params: nu <= mu is required");

    if (root.contains("sweep")) {
        const auto& j = root["sweep"];
        const std::string b = "sweep";
        check_keys(j, b, {"path", "levels", "eps_final"});
        get(j, "path", c.sweep.path, b);
        get(j, "levels", c.sweep.levels, b);
        get(j, "eps_final", c.sweep.eps_final, b);
    }
    parse_path(c.sweep.path);
    sweep_points(parse_path(c.sweep.path), c.sweep.levels, c.sweep.eps_final);

    if (root.contains("output")) {
        const auto& j = root["output"];
        check_keys(j, "output", {"dir", "formats"});
        get(j, "dir", c.out_dir, "output");
        get(j, "formats", c.formats, "output");
        if (c.formats.empty()) throw std::invalid_argument("output.formats must not be empty");
        for (const auto& f : c.formats)
            if (f != "csv" && f != "json") throw std::invalid_argument("output.formats: unknown format '" + f + "'");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
    const auto& m = c.material;
    const auto& o = c.solver.opt;
    json j;
    j["schema"] = kConfigSchema;
    j["material"] = {{"gamma1", m.gamma1}, {"gamma2", m.gamma2}, {"ref_trace", m.ref_trace}, {"ref_dev", m.ref_dev},
                     {"c_w", m.c_w},       {"q_exp", m.q_exp},       {"r_bar", m.r_bar},         {"R_bar", m.R_bar},
                     {"kappa", m.kappa},   {"delta", m.delta},   {"m_exp", m.m_exp}};
    j["grid"] = {{"nx", c.grid.nx},
                 {"ny", c.grid.ny},
                 {"lx", c.grid.lx},
                 {"ly", c.grid.ly},
                 {"dirichlet", c.grid.dirichlet},
                 {"neumann", c.grid.neumann}};
    j["loading"] = {{"profile", c.loading.profile},
                    {"T", c.loading.T},
                    {"speed", c.loading.speed},
                    {"w_amp", {c.loading.w_amp[0], c.loading.w_amp[1]}},
                    {"rho0", {c.loading.rho0[0], c.loading.rho0[1], c.loading.rho0[2]}},
                    {"safe_margin", c.loading.safe_margin},
                    {"z0", c.loading.z0},
                    {"unstable", c.loading.unstable}};
    j["solver"] = {{"N", o.N},
                   {"tol_alt", o.tol_alt},
                   {"max_alt", o.max_alt},
                   {"z_min", o.z_min},
                   {"initial_grading", o.initial_grading},
                   {"tol_unidir", o.tol_unidir},
                   {"current_coefficient", o.current_coefficient},
                   {"samples", c.solver.samples},
                   {"time_scale", c.solver.time_scale},
                   {"tol_eq", c.solver.tol.tol_eq},
                   {"tol_rate", c.solver.tol.tol_rate}};
    j["params"] = {{"eps", c.params.eps}, {"mu", c.params.mu}, {"nu", c.params.nu}};
    j["sweep"] = {{"path", c.sweep.path}, {"levels", c.sweep.levels}, {"eps_final", c.sweep.eps_final}};
    j["output"] = {{"dir", c.out_dir}, {"formats", c.formats}};
    return j.dump(2);
}

Problem build_problem(const RunConfig& c) {
    Mesh mesh;
    mesh.nx = c.grid.nx;
    mesh.ny = c.grid.ny;
    mesh.lx = c.grid.lx;
    mesh.ly = c.grid.ly;
    Problem P;
    P.mat = c.material;
    P.space = build_space(mesh, parse_dirichlet(c.grid.dirichlet), c.grid.neumann, c.material);
    P.load = make_loading(P.space, c.material, parse_profile(c.loading.profile), c.loading.speed, c.loading.T,
                          c.loading.w_amp, c.loading.rho0, c.loading.safe_margin);
    return P;
}

State initial_state(const Problem& P, const RunConfig& c) {
    const auto& S = P.space;
    State q = zero_state(S, c.loading.z0);
    if (c.loading.unstable > 0.0) {
        const Vec Bw = S.strain(P.load.w(0.0));
        for (int cell = 0; cell < S.mesh.cells(); ++cell) {
            const double zc = S.cell_z(q.z, cell);
            const double k = P.mat.stiffness(zc) * P.mat.ref_dev;
            const Vec2 target((1.0 + c.loading.unstable) * P.mat.radius(zc), 0.0);
            q.p.segment<2>(2 * cell) = dev_part(Bw.segment<3>(3 * cell)) - target / k;
        }
    }
    return q;
}

std::uint64_t material_hash(const Material& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : {m.gamma1, m.gamma2, m.ref_trace, m.ref_dev, m.c_w, m.q_exp, m.r_bar, m.R_bar, m.kappa, m.delta,
                     m.m_exp}) {
        const auto* b = reinterpret_cast<const unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof(double); ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace vf
