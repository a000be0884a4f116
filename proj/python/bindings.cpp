#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kslab/asymptotics.hpp"
#include "kslab/errors.hpp"
#include "kslab/experiments.hpp"
#include "kslab/io.hpp"
#include "kslab/limit_flow.hpp"

namespace py = pybind11;
using namespace kslab;

namespace {

py::dict run_to_dict(const EpsRunResult& r) {
  py::dict d;
  d["epsilon"] = r.epsilon;
  d["ok"] = r.ok;
  if (!r.ok) {
    d["error"] = r.error;
    return d;
  }
  d["partition_ratio_err"] = r.partition_ratio_err;
  d["sup_u_error"] = r.sup_u_error;
  d["metric_gap"] = r.metric_gap;
  d["de_gap"] = r.de_gap;
  d["rayleigh_gap"] = r.rayleigh_gap;
  d["recovery_metric_gap"] = r.recovery_metric_gap;
  d["layer_sup_I"] = r.layer_sup_I;
  d["layer_l2t_J0"] = r.layer_l2t_J0;
  d["layer_integral_dev"] = r.layer_integral_dev;
  d["mass_drift"] = r.mass_drift;
  d["max_apriori1"] = r.max_apriori1;
  d["max_apriori2"] = r.max_apriori2;
  d["apriori2_tol"] = r.apriori2_tol;
  d["energy_monotone"] = r.energy_monotone;
  d["times"] = r.times;
  d["u_plus"] = r.u_plus_path;
  d["u_limit"] = r.u_limit_path;
  py::list limits;
  for (const auto& e : r.limits.entries) {
    py::dict le;
    le["name"] = e.name;
    le["value"] = e.value;
    le["target"] = e.target;
    le["diverges"] = e.diverges;
    limits.append(le);
  }
  d["measure_limits"] = limits;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kslab, m) {
  m.doc() = "Double-well Kramers-Smoluchowski laboratory (C++ core)";

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<RateConstant>(m, "RateConstant")
      .def_readonly("k", &RateConstant::k)
      .def_readonly("curvature_barrier", &RateConstant::curvature_barrier)
      .def_readonly("curvature_well", &RateConstant::curvature_well)
      .def("__repr__", [](const RateConstant& r) {
        return "RateConstant(k=" + format_double(r.k) + ")";
      });

  m.def(
      "rate",
      [](const std::string& name, double shape) {
        return kramers_rate(*make_potential(name, shape));
      },
      py::arg("potential") = "quartic", py::arg("shape_b") = 0.5,
      "Kramers rate constant and the curvatures it is built from.");

  m.def("limit_solution", &limit_solution, py::arg("u0"), py::arg("k"), py::arg("t"),
        "Two-state relaxation 1 + (u0-1) exp(-k t).");
  m.def("limit_energy", &limit_energy, py::arg("u"),
        "Limit free energy (u ln u + (2-u) ln(2-u)) / 2.");
  m.def("limit_energy_slope", &limit_energy_slope, py::arg("u"), py::arg("v"),
        "Directional derivative DE(u) v.");
  m.def("limit_metric", &limit_metric, py::arg("k"), py::arg("u"), py::arg("v"),
        "Limit metric g_u(v, v), extended by v^2/k across u = 1.");

  m.def(
      "measure_limits",
      [](const std::string& name, double eps, double alpha, double shape) {
        const auto ctx = make_context(make_potential(name, shape), eps, alpha);
        py::list out;
        for (const auto& e : measure_limit_table(ctx).entries) {
          py::dict d;
          d["name"] = e.name;
          d["value"] = e.value;
          d["target"] = e.target;
          d["diverges"] = e.diverges;
          out.append(d);
        }
        return out;
      },
      py::arg("potential"), py::arg("eps"), py::arg("alpha") = 0.5,
      py::arg("shape_b") = 0.5,
      "Small-eps checkpoints of the invariant measure at one eps.");

  m.def(
      "transition_profile",
      [](const std::string& name, double eps, std::vector<double> xs, double alpha,
         double shape) {
        const auto ctx = make_context(make_potential(name, shape), eps, alpha);
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs) out.push_back(eta(ctx, x));
        return out;
      },
      py::arg("potential"), py::arg("eps"), py::arg("x"), py::arg("alpha") = 0.5,
      py::arg("shape_b") = 0.5, "Clamped transition profile eta at the given points.");

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("potential_name", &RunConfig::potential_name)
      .def_readwrite("shape_b", &RunConfig::shape_b)
      .def_readwrite("epsilons", &RunConfig::epsilons)
      .def_readwrite("alpha", &RunConfig::alpha)
      .def_readwrite("u0", &RunConfig::u0)
      .def_readwrite("T", &RunConfig::T)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("L", &RunConfig::L)
      .def_readwrite("n_base", &RunConfig::n_base)
      .def_readwrite("grading", &RunConfig::grading)
      .def_readwrite("eps_aware", &RunConfig::eps_aware)
      .def_readwrite("dt", &RunConfig::dt)
      .def_readwrite("theta", &RunConfig::theta)
      .def_readwrite("snapshots_per_unit", &RunConfig::snapshots_per_unit)
      .def_readwrite("record_every_step", &RunConfig::record_every_step)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def("validate", &RunConfig::validate);

  m.def(
      "run_epsilon",
      [](const RunConfig& cfg, double eps) {
        ConvergenceReport rep;
        {
          py::gil_scoped_release release;
          rep = sweep(cfg, {eps});
        }
        return run_to_dict(rep.runs.at(0));
      },
      py::arg("config"), py::arg("eps"),
      "One trajectory plus its full diagnostics bundle.");

  m.def(
      "sweep_report",
      [](const RunConfig& cfg, const std::vector<double>& epsilons) {
        std::string text;
        {
          py::gil_scoped_release release;
          text = report_to_json(sweep(cfg, epsilons));
        }
        return text;
      },
      py::arg("config"), py::arg("epsilons"),
      "Full epsilon sweep; returns the report as a JSON string.");
}
