#include "viscoflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vf {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols{
        "s",       "t",          "tp",        "E0",        "E_mu",      "dtE",       "u_norm",    "z_norm",
        "p_norm",  "S_u",        "d_tilde",   "W_p",       "W_p_mu",    "D_star",    "M_eps",     "M0_CL",
        "M0_CL_violation",       "M0_CR",     "M0_CR_violation",        "M0_mu0",    "M0_mu0_violation",
        "M0_munu", "M0_munu_violation",       "lambda_z",  "lambda_up", "lambda_fit_residual",   "regime",
        "sw_t_lz", "sw_t_lup",   "sw_lup_lz", "hill",      "chain_rule"};
    return cols;
}

std::string trajectory_csv(const CurveAnalysis& a) {
    std::ostringstream os;
    const auto& cols = trajectory_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : a.samples) {
        const double vals[] = {r.s,
                               r.t,
                               r.tp,
                               r.energy0,
                               r.energy_mu,
                               r.dtE,
                               r.in.u_norm,
                               r.in.z_norm,
                               r.in.p_norm,
                               r.in.slopes0.Su,
                               r.in.slopes0.dz,
                               r.in.slopes0.Wp,
                               r.in.slopes_mu.Wp,
                               r.Dstar,
                               r.M_eps,
                               r.cl.finite_part,
                               r.cl.max_violation(),
                               r.cr.finite_part,
                               r.cr.max_violation(),
                               r.mu0.finite_part,
                               r.mu0.max_violation(),
                               r.munu.finite_part,
                               r.munu.max_violation(),
                               r.lambda.lambda_z,
                               r.lambda.lambda_up,
                               r.lambda.fit_residual};
        bool first = true;
        for (double v : vals) {
            os << (first ? "" : ",") << fmt_double(v);
            first = false;
        }
        os << ',' << to_string(r.lambda.regime);
        for (double v : {r.sw_t_lz, r.sw_t_lup, r.sw_lup_lz, r.hill, r.chain_rule}) os << ',' << fmt_double(v);
        os << '\n';
    }
    return os.str();
}

std::string trajectory_json(const CurveAnalysis& a) {
    // the CSV is the single source of the row layout
    std::istringstream is(trajectory_csv(a));
    std::string line;
    std::getline(is, line);
    nlohmann::json rows = nlohmann::json::array();
    const auto& cols = trajectory_columns();
    const auto regime_col = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "regime") - cols.begin());
    while (std::getline(is, line)) {
        nlohmann::json row = nlohmann::json::array();
        std::stringstream ls(line);
        std::string cell;
        for (std::size_t c = 0; std::getline(ls, cell, ','); ++c) {
            if (c == regime_col) {
                row.push_back(cell);
                continue;
            }
            const double v = std::stod(cell);
            if (std::isfinite(v))
                row.push_back(v);
            else
                row.push_back(nullptr);
        }
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"columns", trajectory_columns()}, {"rows", rows}}.dump() + "\n";
}

std::string states_csv(const ViscousRun& run) {
    std::ostringstream os;
    os << "step,t,E_mu,residual,gap";
    if (run.states.empty()) return os.str() + '\n';
    const State& q0 = run.states[0];
    for (int i = 0; i < q0.u.size(); ++i) os << ",u" << i;
    for (int i = 0; i < q0.z.size(); ++i) os << ",z" << i;
    for (int i = 0; i < q0.p.size(); ++i) os << ",p" << i;
    os << '\n';
    for (std::size_t k = 0; k < run.states.size(); ++k) {
        auto at = [&](const std::vector<double>& v) { return k < v.size() ? v[k] : 0.0; };
        os << k << ',' << fmt_double(run.times[k]) << ',' << fmt_double(at(run.energies)) << ','
           << fmt_double(at(run.residuals)) << ',' << fmt_double(at(run.gaps));
        for (const Vec* v : {&run.states[k].u, &run.states[k].z, &run.states[k].p})
            for (int i = 0; i < v->size(); ++i) os << ',' << fmt_double((*v)[i]);
        os << '\n';
    }
    return os.str();
}

ViscousRun parse_states_csv(const std::string& text, const DiscreteSpace& space) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("states csv: empty");
    const int nu = space.n_u(), nz = space.n_z(), np = space.n_p();
    const int width = 5 + nu + nz + np;
    int header_cols = 1;
    for (char c : line) header_cols += c == ',';
    if (line.rfind("step,t,", 0) != 0 || header_cols != width)
        throw std::invalid_argument("states csv: header does not match the grid");
    ViscousRun run;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
        if (static_cast<int>(v.size()) != width) throw std::invalid_argument("states csv: ragged row");
        run.times.push_back(v[1]);
        run.energies.push_back(v[2]);
        run.residuals.push_back(v[3]);
        run.gaps.push_back(v[4]);
        State q{Vec(nu), Vec(nz), Vec(np)};
        for (int i = 0; i < nu; ++i) q.u[i] = v[5 + i];
        for (int i = 0; i < nz; ++i) q.z[i] = v[5 + nu + i];
        for (int i = 0; i < np; ++i) q.p[i] = v[5 + nu + nz + i];
        run.states.push_back(std::move(q));
    }
    if (run.states.size() < 2) throw std::invalid_argument("states csv: need at least two rows");
    run.complete = true;
    return run;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace vf
