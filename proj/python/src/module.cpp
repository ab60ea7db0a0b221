#include "borel/app.hpp"
#include "borel/bounds.hpp"
#include "borel/harry_dym.hpp"
#include "borel/problem_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace borel;

namespace {

py::dict check_problem(const std::string& path) {
    auto pp = parse_problem(path);
    const auto& p = pp.problem;
    py::list violations;
    for (const auto& v : validate_constraint(p)) violations.append(py::make_tuple(v.term, v.weight, v.message));
    auto cone = check_cone_condition(p.symbol, p.sector.phi);
    py::dict alpha_q;
    for (const auto& [key, list] : p.alpha_q) {
        py::list l;
        for (const auto& a : list) l.append(to_string(a));
        alpha_q[py::str(key)] = l;
    }
    py::dict d;
    d["name"] = p.name;
    d["n"] = p.n;
    d["m"] = p.m;
    d["alpha_r"] = to_string(p.alpha_r);
    d["alpha_q"] = alpha_q;
    d["violations"] = violations;
    d["cone_ok"] = cone.ok;
    d["cone_C"] = cone.C;
    d["cone_R"] = cone.R;
    return d;
}

std::vector<std::string> harry_dym_H(int N) {
    auto c = harry_dym_series(N);
    std::vector<std::string> out;
    for (const auto& h : c.H_exact) out.push_back(h.to_string({"z"}));
    return out;
}

}  // namespace

PYBIND11_MODULE(_borelsum, m) {
    m.doc() = "Borel-Laplace toolkit for nonlinear evolution PDEs";

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("exit_code", &RunResult::exit_code)
        .def_readonly("summary", &RunResult::summary)
        .def_readonly("artifacts", &RunResult::artifacts)
        .def("__repr__", [](const RunResult& r) { return "<RunResult exit_code=" + std::to_string(r.exit_code) + ">"; });

    m.def(
        "run",
        [](const std::string& command, const std::string& problem, const std::string& out,
           const std::map<std::string, std::string>& overrides) {
            py::gil_scoped_release release;
            return borel::run({command, problem, out, overrides});
        },
        py::arg("command"), py::arg("problem"), py::arg("out"), py::arg("overrides") = std::map<std::string, std::string>{},
        "Runs one subcommand; artifacts land in `out`.");
    m.def("commands", &run_commands, "Subcommand names.");
    m.def("override_keys", &override_keys, py::arg("command"), "Override keys a subcommand accepts.");
    m.def("check_problem", &check_problem, py::arg("path"), "Constraint, cone and decay data of a problem file.");
    m.def("m0_constant", &m0_constant, "Supremum constant of the nu-norm weight.");
    m.def("harry_dym_series", &harry_dym_H, py::arg("N"), "H_0..H_N of the small-time Harry-Dym series as text.");
    m.def("sha256_hex", &sha256_hex, py::arg("data"));
}
