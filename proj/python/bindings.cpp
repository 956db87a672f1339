#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "viscoflow/bv_analysis.hpp"
#include "viscoflow/config.hpp"
#include "viscoflow/io.hpp"
#include "viscoflow/suites.hpp"

namespace py = pybind11;
using namespace vf;

namespace {

struct Session {
    RunConfig cfg;
    Problem P;
    explicit Session(const std::string& json_text) : cfg(parse_config(json_text)), P(build_problem(cfg)) {}
};

py::dict run_dict(const ViscousRun& r) {
    py::dict d;
    d["complete"] = r.complete;
    d["error"] = r.error;
    d["times"] = r.times;
    d["energies"] = r.energies;
    d["residuals"] = r.residuals;
    d["gaps"] = r.gaps;
    d["iterations"] = r.iterations;
    d["total_residual"] = r.total_residual();
    d["energy_scale"] = r.energy_scale();
    std::vector<Vec> z;
    for (const auto& q : r.states) z.push_back(q.z);
    d["z"] = z;
    return d;
}

py::dict suite_dict(const SuiteResult& s) {
    py::dict d;
    d["name"] = s.name;
    d["pass"] = s.pass;
    d["value"] = s.value;
    d["tol"] = s.tol;
    d["detail"] = s.detail;
    return d;
}

}  // namespace

PYBIND11_MODULE(_viscoflow, m) {
    m.doc() = "viscoflow core bindings";

    py::class_<ParamTriple>(m, "Params")
        .def(py::init([](double eps, double mu, double nu) { return ParamTriple{eps, mu, nu}; }), py::arg("eps"),
             py::arg("mu"), py::arg("nu"))
        .def_readwrite("eps", &ParamTriple::eps)
        .def_readwrite("mu", &ParamTriple::mu)
        .def_readwrite("nu", &ParamTriple::nu);

    py::class_<Session>(m, "Session")
        .def(py::init<const std::string&>(), py::arg("config_json"))
        .def_property_readonly("config_json", [](const Session& s) { return config_to_json(s.cfg); })
        .def_property_readonly("params", [](const Session& s) { return s.cfg.params; })
        .def_property_readonly("dofs", [](const Session& s) {
            return py::make_tuple(s.P.space.n_free(), s.P.space.n_z(), s.P.space.n_p());
        })
        .def("solve",
             [](const Session& s, std::optional<ParamTriple> par, std::optional<int> N) {
                 SolverOptions opt = s.cfg.solver.opt;
                 if (N) opt.N = *N;
                 py::gil_scoped_release nogil;
                 ViscousRun r = solve(s.P, initial_state(s.P, s.cfg), par.value_or(s.cfg.params), opt);
                 py::gil_scoped_acquire gil;
                 return run_dict(r);
             },
             py::arg("params") = py::none(), py::arg("N") = py::none())
        .def("trajectory_csv",
             [](const Session& s, std::optional<ParamTriple> par) {
                 const ParamTriple p = par.value_or(s.cfg.params);
                 const ViscousRun r = solve(s.P, initial_state(s.P, s.cfg), p, s.cfg.solver.opt);
                 if (!r.complete) throw std::runtime_error(r.error);
                 const ParamTrajectory tr = reparameterize(s.P, r, s.cfg.solver.samples, s.cfg.solver.time_scale);
                 return trajectory_csv(analyze_curve(s.P, tr, p, s.cfg.solver.tol));
             },
             py::arg("params") = py::none())
        .def("gradient_check", [](const Session& s, int samples, std::uint64_t seed) {
            return suite_dict(gradient_suite(s.P, samples, seed, 1e-6));
        }, py::arg("samples") = 20, py::arg("seed") = kDefaultSeed);

    m.def("columns", &trajectory_columns);
    m.def("constitutive_check", [](const std::string& json_text, int samples) {
        return suite_dict(constitutive_suite(parse_config(json_text).material, samples, kDefaultSeed));
    }, py::arg("config_json"), py::arg("samples") = 1000);
    m.def("sweep_points", [](const std::string& path, const std::vector<double>& levels, double eps_final) {
        return sweep_points(parse_path(path), levels, eps_final);
    });

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<StepError>(m, "StepError", PyExc_RuntimeError);
}
