#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <utility>
#include <vector>

#include "lhsis/deformed.hpp"
#include "lhsis/errors.hpp"
#include "lhsis/invariants.hpp"
#include "lhsis/quadrature.hpp"
#include "lhsis/scenario.hpp"
#include "lhsis/sis.hpp"

namespace py = pybind11;
using namespace lhsis;

namespace {

using Pair = std::pair<double, double>;

std::vector<Pair> book_solution(const CoefficientFunction& bA, const CoefficientFunction& bB,
                                double a, double c1, double c2, const std::vector<double>& times,
                                double tol) {
  BookSolution solution({bA, bB, a}, {c1, c2}, tol);
  std::vector<Pair> out;
  for (double t : times) {
    const CanonicalState s = solution(t);
    out.emplace_back(s.x, s.y);
  }
  return out;
}

std::vector<Pair> sis_solution(const CoefficientFunction& rho0, const CoefficientFunction& b,
                               double a, double c1, double c2, const std::vector<double>& times,
                               double tol) {
  SisSolution solution({rho0, b, a}, {c1, c2}, tol);
  std::vector<Pair> out;
  for (double t : times) {
    const EpidemicState s = solution(t);
    out.emplace_back(s.q, s.p);
  }
  return out;
}

std::vector<Pair> deformed_book_solution(const CoefficientFunction& bA,
                                         const CoefficientFunction& bB, double a, double z,
                                         double c1, double c2, const std::vector<double>& times,
                                         double tol) {
  DeformedBookSolution solution({{bA, bB, a}, z}, {c1, c2}, tol);
  std::vector<Pair> out;
  for (double t : times) {
    const CanonicalState s = solution(t);
    out.emplace_back(s.x, s.y);
  }
  return out;
}

std::vector<Pair> deformed_sis_solution(const CoefficientFunction& rho0,
                                        const CoefficientFunction& b, double a, double z,
                                        double c1, double c2, const std::vector<double>& times,
                                        double tol) {
  DeformedSisSolution solution({{rho0, b, a}, z}, {c1, c2}, tol);
  std::vector<Pair> out;
  for (double t : times) {
    const EpidemicState s = solution(t);
    out.emplace_back(s.q, s.p);
  }
  return out;
}

py::dict report_dict(const Scenario& sc, const RunReport& r) {
  py::dict d;
  d["status"] = static_cast<int>(r.status);
  d["message"] = r.message;
  d["max_deviation"] = r.max_deviation;
  d["max_residual"] = r.max_residual;
  d["tolerance"] = r.tolerance;
  d["failing_time"] = r.failing_time ? py::cast(*r.failing_time) : py::none();
  d["c1"] = r.trajectory.metadata.constants.c1;
  d["c2"] = r.trajectory.metadata.constants.c2;
  d["t_max"] = r.trajectory.metadata.window.t_max;
  py::list samples;
  for (const Sample& s : r.trajectory.samples) {
    py::dict row;
    row["t"] = s.t;
    row["exact"] = Pair{s.exact[0], s.exact[1]};
    row["numeric"] = Pair{s.numeric[0], s.numeric[1]};
    row["images"] = s.images;
    row["deviation"] = s.deviation;
    row["residual"] = s.residual;
    row["physical"] = s.physical;
    samples.append(std::move(row));
  }
  d["samples"] = samples;
  std::ostringstream csv;
  write_csv(csv, sc, r.trajectory);
  d["csv"] = csv.str();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact and numerical solutions of time-dependent SIS and book-algebra systems";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ScenarioError>(m, "ScenarioError", error.ptr());

  py::class_<CoefficientFunction>(m, "Coefficient")
      .def(py::init([](const std::string& text) { return CoefficientFunction::parse(text); }),
           py::arg("expression"))
      .def(py::init([](double value) { return CoefficientFunction::constant(value); }),
           py::arg("value"))
      .def_static("constant", &CoefficientFunction::constant, py::arg("value"))
      .def_static("linear", &CoefficientFunction::linear, py::arg("slope"), py::arg("intercept"))
      .def_static("sinusoidal", &CoefficientFunction::sinusoidal, py::arg("mean"),
                  py::arg("amplitude"), py::arg("frequency"), py::arg("phase") = 0.0)
      .def("__call__", &CoefficientFunction::operator(), py::arg("t"))
      .def("expression", [](const CoefficientFunction& f) { return to_string(*f.to_expression()); })
      .def("is_constant", &CoefficientFunction::is_constant)
      .def("__repr__", [](const CoefficientFunction& f) { return "Coefficient(" + f.describe() + ")"; });
  py::implicitly_convertible<std::string, CoefficientFunction>();
  py::implicitly_convertible<double, CoefficientFunction>();
  py::implicitly_convertible<int, CoefficientFunction>();

  m.def("parse_expression", [](const std::string& s) { return to_string(*parse_expression(s)); },
        py::arg("text"), "Parse and return the canonical printed form.");

  m.def("integrate",
        [](const std::function<double(double)>& f, double lo, double hi, double tol) {
          return integrate(f, lo, hi, tol);
        },
        py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("tol") = kDefaultQuadratureTol);

  m.def("expm1_ratio", &expm1_ratio, py::arg("z"), py::arg("x"));

  m.def("to_canonical",
        [](double q, double p) {
          const CanonicalState s = to_canonical({q, p});
          return Pair{s.x, s.y};
        },
        py::arg("q"), py::arg("p"));
  m.def("from_canonical",
        [](double x, double y) {
          const EpidemicState s = from_canonical({x, y});
          return Pair{s.q, s.p};
        },
        py::arg("x"), py::arg("y"));

  m.def("book_solution", &book_solution, py::arg("bA"), py::arg("bB"), py::arg("a"),
        py::arg("c1"), py::arg("c2"), py::arg("times"), py::arg("tol") = kDefaultQuadratureTol);
  m.def("sis_solution", &sis_solution, py::arg("rho0"), py::arg("b"), py::arg("a"),
        py::arg("c1"), py::arg("c2"), py::arg("times"), py::arg("tol") = kDefaultQuadratureTol);
  m.def("sis_constant_solution",
        [](double rho0, double c1, double c2, double t) {
          const EpidemicState s = sis_constant_solution(rho0, {c1, c2}, t);
          return Pair{s.q, s.p};
        },
        py::arg("rho0"), py::arg("c1"), py::arg("c2"), py::arg("t"));
  m.def("deformed_book_solution", &deformed_book_solution, py::arg("bA"), py::arg("bB"),
        py::arg("a"), py::arg("z"), py::arg("c1"), py::arg("c2"), py::arg("times"),
        py::arg("tol") = kDefaultQuadratureTol);
  m.def("deformed_sis_solution", &deformed_sis_solution, py::arg("rho0"), py::arg("b"),
        py::arg("a"), py::arg("z"), py::arg("c1"), py::arg("c2"), py::arg("times"),
        py::arg("tol") = kDefaultQuadratureTol);
  m.def("validity_window",
        [](const CoefficientFunction& bA, double a, double z, double c1, double horizon) {
          const DeformedBookSystem sys{{bA, CoefficientFunction::constant(0.0), a}, z};
          return validity_window(sys, c1, horizon).t_max;
        },
        py::arg("bA"), py::arg("a"), py::arg("z"), py::arg("c1"), py::arg("horizon"),
        "First time at which 1 - z c1 e^Theta reaches zero; inf if none before horizon.");

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("z", &Scenario::z)
      .def_readwrite("a", &Scenario::a)
      .def_property_readonly("model",
                             [](const Scenario& s) { return std::string(model_name(s.model)); });
  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); },
        py::arg("text"));
  m.def("load_scenario", [](const std::string& path) { return load_scenario(path); },
        py::arg("path"));
  m.def("run_scenario",
        [](const Scenario& sc, const std::string& method, std::optional<double> tol) {
          if (method != "adaptive" && method != "fixed") {
            throw py::value_error("method must be 'adaptive' or 'fixed'");
          }
          RunOptions opts;
          opts.method = method == "fixed" ? OdeMethod::FixedRk4 : OdeMethod::AdaptiveDormandPrince;
          opts.deviation_tol = tol;
          return report_dict(sc, run_scenario(sc, opts));
        },
        py::arg("scenario"), py::arg("method") = "adaptive", py::arg("tol") = py::none());
  m.def("compare_scenario",
        [](const Scenario& sc, const std::vector<double>& zs) {
          py::list rows;
          for (const CompareRow& r : compare_scenario(sc, zs)) {
            py::dict d;
            d["z"] = r.z;
            d["deformed_vs_classical"] = r.deformed_vs_classical;
            d["first_order_vs_deformed"] = r.first_order_vs_deformed;
            d["first_order_vs_classical"] = r.first_order_vs_classical;
            d["classical_order"] = r.classical_order;
            d["first_order_order"] = r.first_order_order;
            rows.append(std::move(d));
          }
          return rows;
        },
        py::arg("scenario"), py::arg("z_sweep") = std::vector<double>{});
  m.def("run_invariants",
        [](std::uint64_t seed, std::size_t count) {
          py::list out;
          for (const InvariantResult& r : run_invariants(seed, count)) {
            py::dict d;
            d["name"] = r.name;
            d["cases"] = r.cases;
            d["worst"] = r.worst;
            d["threshold"] = r.threshold;
            d["passed"] = r.passed;
            out.append(std::move(d));
          }
          return out;
        },
        py::arg("seed") = 0, py::arg("count") = 100);
}
