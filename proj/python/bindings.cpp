#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cglab/analysis.hpp"
#include "cglab/error.hpp"
#include "cglab/experiment.hpp"
#include "cglab/problems.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Runs a solve from a JSON config; returns (report JSON, trace CSV).
std::pair<std::string, std::string> solve(const std::string& config_json) {
  json j;
  try {
    j = json::parse(config_json);
  } catch (const json::parse_error& e) {
    throw cglab::ConfigError("config", e.what());
  }
  const auto config = cglab::apply_environment(cglab::ExperimentConfig::from_json(j));
  const cglab::Experiment e = cglab::run_experiment(config);
  return {cglab::report_json(e).dump(), cglab::format_trace(e.run.trace)};
}

std::string compare(const std::string& config_json, const std::vector<std::string>& precisions) {
  const auto config = cglab::apply_environment(cglab::ExperimentConfig::from_json(json::parse(config_json)));
  return cglab::compare_precisions(config, precisions).report.dump();
}

std::string verify(const std::string& suite) {
  const cglab::SuiteResult s = cglab::run_suite(suite);
  json out = s.summary;
  out["suite"] = s.name;
  out["passed"] = s.passed;
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Instrumented conjugate gradient experiments";

  // Most derived last: pybind11 tries translators in reverse order.
  py::register_exception<cglab::Error>(m, "Error", PyExc_RuntimeError);
  const auto usage = py::register_exception<cglab::UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<cglab::ConfigError>(m, "ConfigError", usage.ptr());

  py::class_<cglab::RoundingModel>(m, "RoundingModel")
      .def(py::init(&cglab::RoundingModel::parse), py::arg("spec") = "double")
      .def_property_readonly("bits", &cglab::RoundingModel::bits)
      .def_property_readonly("unit_roundoff", &cglab::RoundingModel::unit_roundoff)
      .def("round", &cglab::RoundingModel::round)
      .def("add", &cglab::RoundingModel::add)
      .def("sub", &cglab::RoundingModel::sub)
      .def("mul", &cglab::RoundingModel::mul)
      .def("div", &cglab::RoundingModel::div)
      .def("sqrt", &cglab::RoundingModel::sqrt)
      .def("__repr__", [](const cglab::RoundingModel& r) { return "RoundingModel('" + r.to_string() + "')"; });

  py::class_<cglab::MonotonicityReport>(m, "MonotonicityReport")
      .def_readonly("series_name", &cglab::MonotonicityReport::series_name)
      .def_readonly("violations", &cglab::MonotonicityReport::violations)
      .def_readonly("trailing", &cglab::MonotonicityReport::trailing)
      .def_readonly("first_stagnation", &cglab::MonotonicityReport::first_stagnation)
      .def_readonly("length", &cglab::MonotonicityReport::length);

  m.def(
      "scan_almost_monotonicity",
      [](const std::vector<double>& series, double eps_m) {
        return cglab::scan_almost_monotonicity(series, eps_m);
      },
      py::arg("series"), py::arg("eps_m") = 0x1p-53);
  m.def("theorem5_threshold", [](double eps_m) { return cglab::theorem5_threshold(eps_m); }, py::arg("eps_m"));

  m.def("_solve", &solve, py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
  m.def("_compare", &compare, py::arg("config_json"), py::arg("precisions"), py::call_guard<py::gil_scoped_release>());
  m.def("_verify", &verify, py::arg("suite"), py::call_guard<py::gil_scoped_release>());
}
