#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "eprbound/fpe.hpp"
#include "eprbound/runner.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace eprbound;

namespace {

py::array_t<double> field_array(const ScalarField& f) {
  // (ny, nx) layout: row index j, column index i.
  py::array_t<double> a({f.grid.ny, f.grid.nx});
  auto r = a.mutable_unchecked<2>();
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) r(j, i) = f.at(i, j);
  return a;
}

RunConfig config_from_string(const std::string& text) {
  return load_config(json::parse(text));
}

std::string report_string(json (*builder)(const RunConfig&), const std::string& config) {
  return builder(config_from_string(config)).dump();
}

}  // namespace

PYBIND11_MODULE(_eprbound, m) {
  m.doc() = "steady-state dissipation bounds for confined 2-D diffusions";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<expr::ParseError>(m, "ExprParseError", PyExc_ValueError);
  py::register_exception<expr::EvalError>(m, "ExprEvalError", PyExc_ValueError);

  py::class_<expr::Expression>(m, "Expression")
      .def("__call__", &expr::Expression::operator(), py::arg("x"), py::arg("y"))
      .def("__str__", &expr::Expression::str);
  m.def("parse_expression", [](const std::string& s) { return expr::parse(s); });

  py::class_<System>(m, "System")
      .def_readonly("name", &System::name)
      .def_property_readonly("domain",
                             [](const System& s) {
                               return py::make_tuple(s.domain.x_min, s.domain.x_max,
                                                     s.domain.y_min, s.domain.y_max);
                             })
      .def_property_readonly("diffusion",
                             [](const System& s) {
                               return py::make_tuple(s.diffusion.d1, s.diffusion.d2);
                             })
      .def("drift", [](const System& s, double x, double y) {
        Vec2 f = s.drift(x, y);
        return py::make_tuple(f.x, f.y);
      });

  m.def("catalog_names", [] { return catalog_names(); });
  m.def(
      "catalog_system",
      [](const std::string& name, const std::map<std::string, double>& params) {
        return make_catalog_system(name, params);
      },
      py::arg("name"), py::arg("params") = std::map<std::string, double>{});
  m.def("system_from_config",
        [](const std::string& config) { return build_system(json::parse(config)); });

  m.def(
      "solve",
      [](const System& sys, int n) {
        Grid grid(sys.domain, n, n);
        SteadyState state = solve_steady(sys, grid);
        py::dict out;
        out["rho"] = field_array(state.rho);
        out["residual_linf"] = state.residual_linf;
        out["iterations"] = state.iterations;
        out["x"] = [&] {
          py::array_t<double> xs(grid.nx);
          auto r = xs.mutable_unchecked<1>();
          for (int i = 0; i < grid.nx; ++i) r(i) = grid.x_center(i);
          return xs;
        }();
        out["y"] = [&] {
          py::array_t<double> ys(grid.ny);
          auto r = ys.mutable_unchecked<1>();
          for (int j = 0; j < grid.ny; ++j) r(j) = grid.y_center(j);
          return ys;
        }();
        return out;
      },
      py::arg("system"), py::arg("n"), "Solve the stationary zero-flux problem on an n x n grid");

  m.def(
      "estimate_constants",
      [](double x_min, double x_max, double y_min, double y_max, const std::vector<int>& grids) {
        DomainConstants dc = estimate_constants(Domain{x_min, x_max, y_min, y_max}, grids);
        py::dict out;
        out["c1"] = dc.c1;
        out["c2"] = dc.c2;
        out["extrapolated"] = dc.extrapolated;
        return out;
      },
      py::arg("x_min"), py::arg("x_max"), py::arg("y_min"), py::arg("y_max"), py::arg("grids"));

  // Config-driven report builders; each takes and returns JSON text.
  m.def("solve_report", [](const std::string& c) { return report_string(solve_report, c); });
  m.def("functionals_report",
        [](const std::string& c) { return report_string(functionals_report, c); });
  m.def("constants_report",
        [](const std::string& c) { return report_string(constants_report, c); });
  m.def("certify_report", [](const std::string& c) { return report_string(certify_report, c); });
  m.def("sweep_report", [](const std::string& c) { return report_string(sweep_report, c); });
  m.def("locality_report",
        [](const std::string& c) { return report_string(locality_report, c); });
  m.def("simulate_report",
        [](const std::string& c) { return report_string(simulate_report, c); });
}
