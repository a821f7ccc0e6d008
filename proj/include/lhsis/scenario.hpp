#pragma once

// Declarative scenarios: load a JSON problem statement, evaluate the exact
// solution on a time grid, integrate the same system numerically, and report
// per-sample deviations and residuals.
//
// Scenario file layout:
//
//   {
//     "name": "seasonal-sis",                       (optional)
//     "model": "sis",
//     "coefficients": {"rho0": "1 + 0.5*sin(t)", "b": "1"},
//     "z": 0,                                       (deformed models)
//     "a": 0,                                       (default: grid.t_start)
//     "initial": {"chart": "qp", "values": ["2/3", 3]},
//     "grid": {"t_start": 0, "t_end": 5, "n_samples": 101},
//     "tolerances": {"quadrature": 1e-10, "deviation": 1e-6,
//                    "rtol": 1e-10, "atol": 1e-12, "rk4_step": 1e-3},
//     "seed": 0
//   }
//
// Models and their coefficient names / initial chart:
//   book-canonical, deformed-book   bA, bB     xy
//   sis, deformed-sis               rho0, b    qp
//   sis-constant                    rho0       qp       (rho0 constant, b = 1)
//   moments                         rho0       moments  (mean, variance)
//
// A coefficient is an expression string, a number, or a builtin family object
// {"family": "constant"|"linear"|"sinusoidal", ...parameters, "domain": [lo, hi]}.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lhsis/canonical.hpp"
#include "lhsis/deformed.hpp"
#include "lhsis/oracle.hpp"
#include "lhsis/sis.hpp"

namespace lhsis {

enum class Model { BookCanonical, Sis, SisConstant, Moments, DeformedBook, DeformedSis };
enum class Chart { Canonical, Epidemic, Moments };

std::string_view model_name(Model m);
std::string_view chart_name(Chart c);
Chart chart_of(Model m);
bool is_deformed(Model m);

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t n_samples = 2;

  std::vector<double> times() const;
};

struct Tolerances {
  double quadrature = kDefaultQuadratureTol;
  double deviation = 1e-6;
  double rtol = 1e-10;
  double atol = 1e-12;
  double rk4_step = 1e-3;
};

struct Scenario {
  std::string name;
  Model model = Model::BookCanonical;
  /// (bA, bB) for book models, (rho0, b) for SIS and moment models.
  CoefficientFunction first;
  CoefficientFunction second = CoefficientFunction::constant(1.0);
  double z = 0.0;
  double a = 0.0;
  Vec2 initial{};
  TimeGrid grid;
  Tolerances tol;
  std::uint64_t seed = 0;
};

/// Throws ScenarioError (or ParseError for a bad coefficient expression).
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

enum class RunStatus { Pass = 0, ToleranceViolation = 1, InputError = 2, DomainExit = 3 };

struct Sample {
  double t = 0.0;
  Vec2 exact{};    ///< closed-form state in the scenario chart
  Vec2 numeric{};  ///< integrator state in the scenario chart
  /// Image in the other chart(s); NaN where the map is singular.
  std::vector<double> images;
  double deviation = 0.0;
  double residual = 0.0;
  bool physical = false;
};

struct TrajectoryMetadata {
  IntegrationConstants constants;
  ValidityWindow window;
  OdeMethod method = OdeMethod::AdaptiveDormandPrince;
  SolverStats stats;
};

struct Trajectory {
  std::vector<Sample> samples;
  TrajectoryMetadata metadata;
};

struct RunOptions {
  OdeMethod method = OdeMethod::AdaptiveDormandPrince;
  std::optional<double> deviation_tol;  ///< overrides the scenario's tolerance
};

struct RunReport {
  Trajectory trajectory;
  RunStatus status = RunStatus::Pass;
  double max_deviation = 0.0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::optional<double> failing_time;
  std::string message;
};

/// max_i |a_i - b_i| / max(1, |b_i|)
double scaled_deviation(const Vec2& a, const Vec2& b);

/// Exact-vs-numeric run. Domain exits (validity window, singular chart,
/// integrator underflow) produce status DomainExit with the first failing t.
RunReport run_scenario(const Scenario& sc, const RunOptions& opts = {});

/// Residual of the closed form at t: centered difference of the exact
/// solution against the model's right-hand side, scaled by max(1, |rhs|).
double residual_at(const Scenario& sc, double t);

/// Window of the deformed solution up to grid.t_end; unbounded for
/// classical models.
ValidityWindow scenario_window(const Scenario& sc);

std::vector<std::string> csv_header(Model m);
void write_csv(std::ostream& os, const Scenario& sc, const Trajectory& traj);
std::string report_json(const Scenario& sc, const RunReport& report);

struct CompareRow {
  double z = 0.0;
  double deformed_vs_classical = 0.0;
  double first_order_vs_deformed = 0.0;
  double first_order_vs_classical = 0.0;
  /// Observed orders against the previous row; NaN for the first row.
  double classical_order = 0.0;
  double first_order_order = 0.0;
};

/// Integrates the full deformed, first-order perturbed and classical systems
/// for each z from the scenario's initial state and reports max deviations.
/// Requires a deformed model.
std::vector<CompareRow> compare_scenario(const Scenario& sc, std::span<const double> z_sweep);

void write_compare_csv(std::ostream& os, std::span<const CompareRow> rows);

}  // namespace lhsis
