#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcrp/cli.hpp"
#include "dcrp/discrete.hpp"
#include "dcrp/error.hpp"
#include "dcrp/experiments.hpp"
#include "dcrp/pointprocess.hpp"
#include "dcrp/scaling.hpp"
#include "dcrp/yule.hpp"

namespace py = pybind11;
using namespace dcrp;

namespace {

py::object cell(const Cell& c) {
    return std::visit([](const auto& v) -> py::object { return py::cast(v); }, c);
}

// {"columns": [...], "rows": [[...], ...]}
py::dict to_py(const DataTable& t) {
    py::list rows;
    for (const auto& r : t.rows) {
        py::list row;
        for (const auto& c : r) row.append(cell(c));
        rows.append(row);
    }
    py::dict d;
    d["columns"] = t.columns;
    d["rows"] = rows;
    return d;
}

py::dict to_py(const ExperimentResult& res) {
    py::list checks;
    for (const auto& c : res.checks) {
        py::dict d;
        d["name"] = c.name;
        d["pass"] = c.pass;
        d["value"] = c.value;
        d["threshold"] = c.threshold;
        d["detail"] = c.detail;
        checks.append(d);
    }
    py::dict d;
    d["table"] = to_py(res.table);
    d["checks"] = checks;
    d["passed"] = res.passed();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Disordered Chinese restaurant simulator";

    // Messages start with the error kind, e.g. "ScheduleInfeasible: ...".
    py::register_exception<Error>(m, "DcrpError", PyExc_ValueError);

    py::class_<FitnessSpec>(m, "FitnessSpec")
        .def(py::init([](const std::string& key) { return FitnessSpec::parse(key); }), py::arg("key"))
        .def_property_readonly("key", &FitnessSpec::key)
        .def_property_readonly("evt_class", [](const FitnessSpec& s) { return std::string(to_string(s.evt_class())); })
        .def_property_readonly("essential_sup", &FitnessSpec::essential_sup)
        .def_property_readonly("param", &FitnessSpec::param)
        .def("tail", [](const FitnessSpec& s, double x) { return tail(s, x); })
        .def("quantile_upper", [](const FitnessSpec& s, double u) { return quantile_upper(s, u); })
        .def("normalizers",
             [](const FitnessSpec& s, double t) {
                 const auto n = normalizers(s, t);
                 return py::make_tuple(n.A, n.B);
             })
        .def("phi_limit", [](const FitnessSpec& s, double x) { return phi_limit(s, x); })
        .def("samples",
             [](const FitnessSpec& s, std::size_t n, std::uint64_t seed) {
                 auto rng = make_rng(seed);
                 std::vector<double> out(n);
                 for (auto& x : out) x = sample(s, rng);
                 return out;
             },
             py::arg("n"), py::arg("seed"))
        .def("__repr__", [](const FitnessSpec& s) { return "FitnessSpec('" + s.key() + "')"; })
        .def(py::self == py::self);

    py::class_<ScalingTriple>(m, "ScalingTriple")
        .def_readonly("t", &ScalingTriple::t)
        .def_readonly("u", &ScalingTriple::u)
        .def_readonly("v", &ScalingTriple::v)
        .def_readonly("w", &ScalingTriple::w)
        .def_readonly("v_gap", &ScalingTriple::v_gap);

    m.def("solve_scaling", &solve_scaling, py::arg("spec"), py::arg("t"));
    m.def("scaling_residual", &scaling_residual);
    m.def("phi_t", &phi_t, py::arg("spec"), py::arg("triple"), py::arg("x"));
    m.def("pi_At", &pi_At, py::arg("theta"), py::arg("spec"), py::arg("triple"), py::arg("x"));
    m.def("yule_tail_bound", &yule_tail_bound, py::arg("lam"), py::arg("a"), py::arg("b"), py::arg("y"));

    m.def(
        "box_prediction",
        [](double theta, const FitnessSpec& spec, const ScalingTriple& tr, double a, double b, std::optional<double> c) {
            const auto p = box_prediction(theta, spec, tr, {a, b, c});
            py::dict d;
            d["mean_finite"] = p.mean_finite;
            d["mean_limit"] = p.mean_limit;
            d["void_finite"] = p.void_finite;
            d["void_limit"] = p.void_limit;
            return d;
        },
        py::arg("theta"), py::arg("spec"), py::arg("triple"), py::arg("a"), py::arg("b"), py::arg("c") = py::none());

    m.def(
        "void_identity",
        [](double theta, const FitnessSpec& spec, double t, std::vector<double> xs, std::uint64_t replicas,
           std::uint64_t seed) {
            py::list out;
            for (const auto& r : void_identity_compare(theta, spec, t, xs, replicas, seed)) {
                py::dict d;
                d["x"] = r.x;
                d["predicted"] = r.predicted;
                d["empirical"] = r.empirical;
                d["se"] = r.se;
                d["z"] = r.z;
                out.append(d);
            }
            return out;
        },
        py::arg("theta"), py::arg("spec"), py::arg("t"), py::arg("xs"), py::arg("replicas"), py::arg("seed"));

    m.def(
        "simulate_discrete",
        [](double theta, const FitnessSpec& spec, std::vector<std::uint64_t> checkpoints, std::uint64_t seed,
           std::uint64_t replica) {
            auto rng = make_rng(seed, 0, replica);
            const std::uint64_t n_max = checkpoints.empty() ? 1 : checkpoints.back();
            py::list out;
            for (const auto& r : run_discrete({theta, spec, n_max, std::move(checkpoints)}, rng)) {
                py::dict d;
                d["n"] = r.n;
                d["K_n"] = r.tables;
                d["top_sizes"] = r.top_sizes;
                d["share1"] = r.share1;
                d["share12"] = r.share12;
                d["leader_birth"] = r.leader_birth;
                d["leader_weight"] = r.leader_weight;
                d["table0_share"] = r.table0_share;
                out.append(d);
            }
            return out;
        },
        py::arg("theta"), py::arg("spec"), py::arg("checkpoints"), py::arg("seed"), py::arg("replica") = 0);

    m.def(
        "run_experiment",
        [](const std::string& toml_text) {
            const auto cfg = parse_experiment_config(toml_text);
            const auto res = [&] {
                py::gil_scoped_release release;
                return run_experiment(cfg);
            }();
            return to_py(res);
        },
        py::arg("toml_text"), "Runs the experiment described by a TOML document.");

    m.def("cli", [](std::vector<std::string> args) { return run_cli(args); }, py::arg("args"));
}
