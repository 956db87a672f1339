#include <cmath>
#include <limits>

#include "common.hpp"
#include "doctest.h"
#include "json.hpp"
#include "viscoflow/config.hpp"
#include "viscoflow/io.hpp"

using namespace vf;
using nlohmann::json;

TEST_CASE("reference configuration parses") {
    const RunConfig c = vft::reference_config();
    CHECK(c.material.gamma2 == 200.0);
    CHECK(c.material.q_exp == 5.0);
    CHECK(c.grid.nx == 4);
    CHECK(c.loading.z0 == 0.9);
    CHECK(c.solver.opt.N == 200);
    CHECK(c.solver.opt.current_coefficient);
    CHECK(c.params.eps == 1e-3);
    CHECK(c.sweep.levels.size() == 3);
    CHECK(c.formats == std::vector<std::string>{"csv"});
}

TEST_CASE("config round trip through JSON") {
    const RunConfig c = vft::reference_config();
    const RunConfig d = parse_config(config_to_json(c));
    CHECK(config_to_json(d) == config_to_json(c));
    CHECK(material_hash(d.material) == material_hash(c.material));
    Material m = c.material;
    m.kappa *= 1.0 + 1e-15;
    CHECK(material_hash(m) != material_hash(c.material));
}

TEST_CASE("schema violations are rejected") {
    const std::string base = read_file(vft::config_path("reference.json"));
    auto mutate = [&](auto f) {
        json j = json::parse(base);
        f(j);
        return j.dump();
    };
    CHECK_NOTHROW(parse_config(base));
    CHECK_THROWS_AS(parse_config("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["schema"] = "other/2"; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["material"]["gamma3"] = 1.0; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["material"]["q_exp"] = 3.0; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["grid"]["nx"] = 0; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["loading"]["w_amp"] = {1.0}; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["params"]["eps"] = -1.0; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["output"]["formats"] = {"xml"}; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(mutate([](json& j) { j["sweep"]["path"] = "SIDEWAYS"; })), std::invalid_argument);
    const RunConfig two = parse_config(mutate([](json& j) { j["output"]["formats"] = {"csv", "json"}; }));
    CHECK(two.formats.size() == 2);
}

TEST_CASE("unstable initial datum sits outside the constraint set") {
    const RunConfig c = load_config(vft::config_path("unstable.json"));
    const Problem P = build_problem(c);
    const State q = initial_state(P, c);
    CHECK(q.p.norm() > 0.0);
    CHECK(surrogate_Wp(P, 0.0, q) > 0.0);
}

TEST_CASE("number formatting") {
    CHECK(fmt_double(0.1) == "0.10000000000000001");
    CHECK(fmt_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(fmt_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(fmt_double(std::nan("")) == "nan");
}

TEST_CASE("states table round trip and trajectory tables") {
    RunConfig c = vft::reference_config();
    c.solver.opt.N = 8;
    c.params = {0.1, 0.1, 0.1};
    const Problem P = build_problem(c);
    const ViscousRun run = solve(P, initial_state(P, c), c.params, c.solver.opt);
    REQUIRE(run.complete);
    const std::string csv = states_csv(run);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
    const ViscousRun back = parse_states_csv(csv, P.space);
    REQUIRE(back.states.size() == run.states.size());
    for (std::size_t k = 0; k < run.states.size(); ++k) {
        CHECK(back.times[k] == run.times[k]);
        CHECK((back.states[k].u - run.states[k].u).norm() == 0.0);
        CHECK((back.states[k].z - run.states[k].z).norm() == 0.0);
        CHECK((back.states[k].p - run.states[k].p).norm() == 0.0);
    }
    CHECK_THROWS(parse_states_csv("a,b\n1,2\n", P.space));

    const ParamTrajectory tr = reparameterize(P, run);
    const CurveAnalysis a = analyze_curve(P, tr, c.params);
    const std::string t = trajectory_csv(a);
    const auto& cols = trajectory_columns();
    std::string header;
    for (std::size_t i = 0; i < cols.size(); ++i) header += (i ? "," : "") + cols[i];
    CHECK(t.substr(0, t.find('\n')) == header);
    const json j = json::parse(trajectory_json(a));
    CHECK(j["columns"].size() == cols.size());
    CHECK(j["rows"].size() == tr.size());
    CHECK(j["rows"][0].size() == cols.size());
}
