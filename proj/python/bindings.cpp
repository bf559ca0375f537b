#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "momentdiv/cli.hpp"
#include "momentdiv/equilibrium.hpp"
#include "momentdiv/figures.hpp"
#include "momentdiv/fixed_cost.hpp"
#include "momentdiv/precommitment.hpp"
#include "momentdiv/simulate.hpp"

namespace py = pybind11;
using namespace momentdiv;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Barrier dividend policies under a moment constraint on the number of payments";
    m.attr("__version__") = kVersion;

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<ModelValidationError>(m, "ModelValidationError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<EvalError>(m, "EvalError", base.ptr());

    py::class_<DiffusionModel>(m, "DiffusionModel")
        .def_static("wiener_drift", &DiffusionModel::wiener_drift, py::arg("mu"), py::arg("sigma2"), py::arg("r"))
        .def_static("from_json", [](const std::string& s) { return DiffusionModel::from_json(s); })
        .def_static("load", &DiffusionModel::load)
        .def_readonly("r", &DiffusionModel::r)
        .def("mu", [](const DiffusionModel& d, double x) { return d.mu(x); })
        .def("sigma", [](const DiffusionModel& d, double x) { return d.sigma(x); })
        .def("to_json", &DiffusionModel::to_json)
        .def("hash", &DiffusionModel::hash);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def("ok", &ValidationReport::ok)
        .def_readonly("a1", &ValidationReport::a1)
        .def_readonly("a2", &ValidationReport::a2)
        .def_readonly("a3", &ValidationReport::a3)
        .def_readonly("a4", &ValidationReport::a4)
        .def_readonly("a5", &ValidationReport::a5)
        .def("summary", &ValidationReport::summary);
    m.def("validate_model", &validate_model, py::arg("model"), py::arg("x_max") = kDefaultGridMax,
          py::arg("n_grid") = kDefaultGridPoints);
    m.def("example_model", &example_model);

    py::class_<CanonicalSolution>(m, "CanonicalSolution")
        .def("__call__", &CanonicalSolution::operator())
        .def("d1", &CanonicalSolution::d1)
        .def("d2", &CanonicalSolution::d2)
        .def_property_readonly("closed_form", &CanonicalSolution::closed_form)
        .def_property_readonly("inflection", &CanonicalSolution::inflection)
        .def_property_readonly("x_max", &CanonicalSolution::x_max)
        .def("ode_residual", &CanonicalSolution::ode_residual)
        .def("to_json", &CanonicalSolution::to_json, py::arg("n") = 501);
    m.def("solve_canonical", &solve_canonical, py::arg("model"), py::arg("x_max") = kDefaultGridMax,
          py::arg("normalization") = 1.0);
    m.def("solve_canonical_grid", &solve_canonical_grid, py::arg("model"), py::arg("x_max") = kDefaultGridMax,
          py::arg("normalization") = 1.0);

    py::class_<BarrierPolicy>(m, "BarrierPolicy")
        .def(py::init([](double lo, double hi) {
                 BarrierPolicy p{lo, hi};
                 p.validate();
                 return p;
             }),
             py::arg("x_lower"), py::arg("x_upper"))
        .def_readonly("x_lower", &BarrierPolicy::x_lower)
        .def_readonly("x_upper", &BarrierPolicy::x_upper)
        .def("__repr__", [](const BarrierPolicy& p) {
            std::ostringstream s;
            s << "BarrierPolicy(" << p.x_lower << ", " << p.x_upper << ")";
            return s.str();
        });

    m.def("value_J", py::overload_cast<const CanonicalSolution&, const BarrierPolicy&, double>(&value_J));
    m.def("value_R", py::overload_cast<const CanonicalSolution&, const BarrierPolicy&, double>(&value_R));
    m.def("value_H", &value_H);
    m.def("value_U", &value_U);

    py::class_<FixedCostSolution>(m, "FixedCostSolution")
        .def_readonly("c", &FixedCostSolution::c)
        .def_readonly("policy", &FixedCostSolution::policy)
        .def_property_readonly("case", [](const FixedCostSolution& s) { return std::string(to_string(s.kind)); })
        .def_readonly("residual", &FixedCostSolution::residual)
        .def("value_at", &FixedCostSolution::value_at);
    m.def("solve_fixed_cost", &solve_fixed_cost);
    m.def("ruin_cost_threshold", &ruin_cost_threshold);

    py::class_<PrecommitmentSolution>(m, "PrecommitmentSolution")
        .def_readonly("x0", &PrecommitmentSolution::x0)
        .def_readonly("k", &PrecommitmentSolution::k)
        .def_readonly("c_star", &PrecommitmentSolution::c_star)
        .def_readonly("policy", &PrecommitmentSolution::policy)
        .def_readonly("slack", &PrecommitmentSolution::slack)
        .def_readonly("V", &PrecommitmentSolution::V)
        .def_readonly("constraint_residual", &PrecommitmentSolution::constraint_residual)
        .def_readonly("iterations", &PrecommitmentSolution::iterations);
    m.def("solve_precommitment", &solve_precommitment, py::arg("g"), py::arg("x0"), py::arg("k"));

    py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
        .def_readonly("k", &EquilibriumSolution::k)
        .def_readonly("policy", &EquilibriumSolution::policy)
        .def_readonly("residual_46", &EquilibriumSolution::residual_46)
        .def_readonly("residual_42", &EquilibriumSolution::residual_42)
        .def_readonly("smoothfit_residual", &EquilibriumSolution::smoothfit_residual);
    m.def("solve_equilibrium", &solve_equilibrium, py::arg("g"), py::arg("k"));
    m.def("equilibrium_value", &equilibrium_value);
    m.def(
        "verify_equilibrium",
        [](const CanonicalSolution& g, const EquilibriumSolution& sol, double x_max, std::size_t n) {
            return verify_equilibrium(g, sol, uniform_grid(x_max, n)).to_json();
        },
        py::arg("g"), py::arg("solution"), py::arg("x_max") = 5.0, py::arg("n") = 400,
        "Certificate as a JSON string.");

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_horizon", &SimConfig::t_horizon)
        .def_readwrite("n_paths", &SimConfig::n_paths)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("antithetic", &SimConfig::antithetic)
        .def_readwrite("bridge_correction", &SimConfig::bridge_correction);
    py::class_<MCEstimate>(m, "MCEstimate")
        .def_readonly("mean", &MCEstimate::mean)
        .def_readonly("stderr", &MCEstimate::std_error)
        .def_readonly("n_paths", &MCEstimate::n_paths)
        .def_readonly("seed", &MCEstimate::seed);
    py::class_<SimResult>(m, "SimResult")
        .def_readonly("J", &SimResult::J)
        .def_readonly("R", &SimResult::R)
        .def_readonly("mean_steps", &SimResult::mean_steps);
    m.def("simulate_policy", &simulate_policy, py::arg("model"), py::arg("policy"), py::arg("x0"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    m.def("reproduce_figures", [](const std::string& out_dir) {
        py::list out;
        for (const auto& f : reproduce_figures(out_dir)) {
            if (!f.error.empty()) throw NumericError(f.name + ": " + f.error);
            out.append(f.path);
        }
        return out;
    });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"momentdiv"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        "Runs the command-line interface in process; returns (exit code, stdout, stderr).");
}
