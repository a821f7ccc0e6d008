#include "lhsis/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

#include "format.hpp"
#include "json.hpp"
#include "lhsis/errors.hpp"

namespace lhsis {

namespace {

using json = nlohmann::json;
using detail::format_double;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kResidualStep = 1e-4;

// ---------------------------------------------------------------------------
// Parsing

double number_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ScenarioError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw ScenarioError(where + ": '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioError(where + ": '" + key + "' must be finite");
  return d;
}

double optional_number(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number_field(j, key, where) : fallback;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ScenarioError(where + ": unknown field '" + key + "'");
  }
}

CoefficientFunction parse_coefficient(const json& j, const std::string& name) {
  const std::string where = "coefficient '" + name + "'";
  if (j.is_number()) return CoefficientFunction::constant(j.get<double>());
  if (j.is_string()) return CoefficientFunction::parse(j.get<std::string>());
  if (!j.is_object()) {
    throw ScenarioError(where + ": expected an expression string, number or family object");
  }
  std::optional<Interval> hint;
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number()) {
      throw ScenarioError(where + ": 'domain' must be [lo, hi]");
    }
    hint = Interval{d[0].get<double>(), d[1].get<double>()};
    if (!(hint->lo <= hint->hi)) throw ScenarioError(where + ": empty domain");
  }
  if (j.contains("expression")) {
    reject_unknown_keys(j, {"expression", "domain"}, where);
    if (!j.at("expression").is_string()) throw ScenarioError(where + ": 'expression' must be text");
    return CoefficientFunction::parse(j.at("expression").get<std::string>(), hint);
  }
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw ScenarioError(where + ": missing 'family'");
  }
  const std::string family = j.at("family").get<std::string>();
  if (family == "constant") {
    reject_unknown_keys(j, {"family", "value", "domain"}, where);
    return CoefficientFunction(ConstantFamily{number_field(j, "value", where)}, hint);
  }
  if (family == "linear") {
    reject_unknown_keys(j, {"family", "slope", "intercept", "domain"}, where);
    return CoefficientFunction(
        LinearFamily{number_field(j, "slope", where), number_field(j, "intercept", where)}, hint);
  }
  if (family == "sinusoidal") {
    reject_unknown_keys(j, {"family", "mean", "amplitude", "frequency", "phase", "domain"}, where);
    return CoefficientFunction(
        SinusoidalFamily{number_field(j, "mean", where), number_field(j, "amplitude", where),
                         number_field(j, "frequency", where),
                         optional_number(j, "phase", 0.0, where)},
        hint);
  }
  throw ScenarioError(where + ": unknown family '" + family + "'");
}

double parse_initial_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const ExprPtr e = parse_expression(v.get<std::string>());
    if (depends_on_t(*e)) throw ScenarioError("initial value must not depend on t");
    return evaluate(*e, 0.0);
  }
  throw ScenarioError("initial values must be numbers or constant expressions");
}

Model parse_model(const std::string& s) {
  for (Model m : {Model::BookCanonical, Model::Sis, Model::SisConstant, Model::Moments,
                  Model::DeformedBook, Model::DeformedSis}) {
    if (model_name(m) == s) return m;
  }
  throw ScenarioError("unknown model '" + s + "'");
}

std::pair<const char*, const char*> coefficient_names(Model m) {
  switch (m) {
    case Model::BookCanonical:
    case Model::DeformedBook: return {"bA", "bB"};
    case Model::Sis:
    case Model::DeformedSis: return {"rho0", "b"};
    case Model::SisConstant:
    case Model::Moments: return {"rho0", nullptr};
  }
  return {nullptr, nullptr};
}

// ---------------------------------------------------------------------------
// Models

Vec2 to_vec(CanonicalState s) { return {s.x, s.y}; }
Vec2 to_vec(EpidemicState s) { return {s.q, s.p}; }
Vec2 to_vec(MomentState s) { return {s.mean, s.variance}; }
CanonicalState as_canonical(const Vec2& v) { return {v[0], v[1]}; }
EpidemicState as_epidemic(const Vec2& v) { return {v[0], v[1]}; }
MomentState as_moments(const Vec2& v) { return {v[0], v[1]}; }

std::vector<double> epidemic_image(const Vec2& xy) {
  try {
    const EpidemicState e = from_canonical(as_canonical(xy));
    return {e.q, e.p};
  } catch (const SingularLocusError&) {
    return {kNaN, kNaN};
  }
}

std::vector<double> canonical_image(const Vec2& qp) {
  try {
    const CanonicalState c = to_canonical(as_epidemic(qp));
    return {c.x, c.y};
  } catch (const SingularLocusError&) {
    return {kNaN, kNaN};
  }
}

class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual Vec2 exact(double t) = 0;
  virtual Vec2 rhs(double t, const Vec2& s) const = 0;
  virtual std::vector<double> images(const Vec2& s) const = 0;
  virtual bool physical(const Vec2& s) const = 0;

  IntegrationConstants constants;
  ValidityWindow window;
};

bool epidemic_physical(const Vec2& qp) { return qp[0] > 0.0 && qp[1] > 0.0; }

class BookAdapter final : public ModelAdapter {
 public:
  explicit BookAdapter(const Scenario& sc)
      : sys_{sc.first, sc.second, sc.a},
        solution_(sys_, fit_constants(sys_, sc.a, as_canonical(sc.initial)), sc.tol.quadrature) {
    constants = solution_.constants();
  }
  Vec2 exact(double t) override { return to_vec(solution_(t)); }
  Vec2 rhs(double t, const Vec2& s) const override { return lhsis::rhs(sys_, t, as_canonical(s)); }
  std::vector<double> images(const Vec2& s) const override { return epidemic_image(s); }
  bool physical(const Vec2& s) const override {
    const auto img = images(s);
    return epidemic_physical({img[0], img[1]});
  }

 private:
  BookSystem sys_;
  BookSolution solution_;
};

class SisAdapter final : public ModelAdapter {
 public:
  explicit SisAdapter(const Scenario& sc)
      : sys_{sc.first, sc.second, sc.a},
        solution_(sys_, sis_fit_constants(sys_, sc.a, as_epidemic(sc.initial)), sc.tol.quadrature) {
    constants = sis_fit_constants(sys_, sc.a, as_epidemic(sc.initial));
  }
  Vec2 exact(double t) override { return to_vec(solution_(t)); }
  Vec2 rhs(double t, const Vec2& s) const override { return sis_rhs(sys_, t, as_epidemic(s)); }
  std::vector<double> images(const Vec2& s) const override { return canonical_image(s); }
  bool physical(const Vec2& s) const override { return epidemic_physical(s); }

 private:
  SisSystem sys_;
  SisSolution solution_;
};

class SisConstantAdapter : public ModelAdapter {
 public:
  explicit SisConstantAdapter(const Scenario& sc, EpidemicState initial)
      : rho0_(sc.first(sc.a)),
        a_(sc.a),
        sys_{CoefficientFunction::constant(rho0_), CoefficientFunction::constant(1.0), sc.a} {
    constants = sis_fit_constants(sys_, sc.a, initial);
  }
  Vec2 exact(double t) override {
    return to_vec(sis_constant_solution(rho0_, constants, t - a_));
  }
  Vec2 rhs(double t, const Vec2& s) const override { return sis_rhs(sys_, t, as_epidemic(s)); }
  std::vector<double> images(const Vec2& s) const override { return canonical_image(s); }
  bool physical(const Vec2& s) const override { return epidemic_physical(s); }

 protected:
  double rho0_;
  double a_;
  SisSystem sys_;
};

class MomentsAdapter final : public SisConstantAdapter {
 public:
  explicit MomentsAdapter(const Scenario& sc)
      : SisConstantAdapter(sc, state_from_moments(as_moments(sc.initial))) {}
  Vec2 exact(double t) override {
    return to_vec(moments_from_state(sis_constant_solution(rho0_, constants, t - a_)));
  }
  Vec2 rhs(double, const Vec2& s) const override { return moment_rhs(rho0_, as_moments(s)); }
  std::vector<double> images(const Vec2& s) const override {
    try {
      const EpidemicState e = state_from_moments(as_moments(s));
      return {e.q, e.p};
    } catch (const DomainError&) {
      return {kNaN, kNaN};
    }
  }
  bool physical(const Vec2& s) const override { return s[0] > 0.0 && s[1] > 0.0; }
};

class DeformedBookAdapter final : public ModelAdapter {
 public:
  explicit DeformedBookAdapter(const Scenario& sc)
      : sys_{{sc.first, sc.second, sc.a}, sc.z},
        solution_(sys_, deformed_fit_constants(sys_, sc.a, as_canonical(sc.initial)),
                  sc.tol.quadrature) {
    constants = solution_.constants();
    if (sc.grid.t_end > sc.a) {
      window = validity_window(sys_, constants.c1, sc.grid.t_end, sc.tol.quadrature);
    }
  }
  Vec2 exact(double t) override { return to_vec(solution_(t)); }
  Vec2 rhs(double t, const Vec2& s) const override {
    return deformed_rhs(sys_, t, as_canonical(s));
  }
  std::vector<double> images(const Vec2& s) const override { return epidemic_image(s); }
  bool physical(const Vec2& s) const override {
    const auto img = images(s);
    return epidemic_physical({img[0], img[1]});
  }

 private:
  DeformedBookSystem sys_;
  DeformedBookSolution solution_;
};

class DeformedSisAdapter final : public ModelAdapter {
 public:
  explicit DeformedSisAdapter(const Scenario& sc)
      : sys_{{sc.first, sc.second, sc.a}, sc.z},
        solution_(sys_, deformed_sis_fit_constants(sys_, sc.a, as_epidemic(sc.initial)),
                  sc.tol.quadrature) {
    constants = solution_.book().constants();
    if (sc.grid.t_end > sc.a) {
      window = validity_window(sys_.as_book(), constants.c1, sc.grid.t_end, sc.tol.quadrature);
    }
  }
  Vec2 exact(double t) override { return to_vec(solution_(t)); }
  Vec2 rhs(double t, const Vec2& s) const override {
    return deformed_sis_rhs(sys_, t, as_epidemic(s));
  }
  std::vector<double> images(const Vec2& s) const override { return canonical_image(s); }
  bool physical(const Vec2& s) const override { return epidemic_physical(s); }

 private:
  DeformedSisSystem sys_;
  DeformedSisSolution solution_;
};

std::unique_ptr<ModelAdapter> make_adapter(const Scenario& sc) {
  switch (sc.model) {
    case Model::BookCanonical: return std::make_unique<BookAdapter>(sc);
    case Model::Sis: return std::make_unique<SisAdapter>(sc);
    case Model::SisConstant:
      return std::make_unique<SisConstantAdapter>(sc, as_epidemic(sc.initial));
    case Model::Moments: return std::make_unique<MomentsAdapter>(sc);
    case Model::DeformedBook: return std::make_unique<DeformedBookAdapter>(sc);
    case Model::DeformedSis: return std::make_unique<DeformedSisAdapter>(sc);
  }
  throw ScenarioError("unsupported model");
}

OdeRhs ode_rhs(const ModelAdapter& model) {
  return [&model](double t, const StateVector& y) {
    const Vec2 d = model.rhs(t, {y[0], y[1]});
    return StateVector{d[0], d[1]};
  };
}

double finite_difference_residual(ModelAdapter& model, double t) {
  const double step = kResidualStep * std::max(1.0, std::abs(t));
  const Vec2 here = model.exact(t);
  Vec2 slope{};
  try {
    const Vec2 ahead = model.exact(t + step);
    const Vec2 behind = model.exact(t - step);
    for (std::size_t i = 0; i < 2; ++i) slope[i] = (ahead[i] - behind[i]) / (2.0 * step);
  } catch (const DomainError&) {
    // One-sided second-order stencil on whichever side stays in the domain.
    try {
      const Vec2 b1 = model.exact(t - step);
      const Vec2 b2 = model.exact(t - 2.0 * step);
      for (std::size_t i = 0; i < 2; ++i) {
        slope[i] = (3.0 * here[i] - 4.0 * b1[i] + b2[i]) / (2.0 * step);
      }
    } catch (const DomainError&) {
      const Vec2 f1 = model.exact(t + step);
      const Vec2 f2 = model.exact(t + 2.0 * step);
      for (std::size_t i = 0; i < 2; ++i) {
        slope[i] = (-3.0 * here[i] + 4.0 * f1[i] - f2[i]) / (2.0 * step);
      }
    }
  }
  const Vec2 expected = model.rhs(t, here);
  return scaled_deviation(slope, expected);
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string_view model_name(Model m) {
  switch (m) {
    case Model::BookCanonical: return "book-canonical";
    case Model::Sis: return "sis";
    case Model::SisConstant: return "sis-constant";
    case Model::Moments: return "moments";
    case Model::DeformedBook: return "deformed-book";
    case Model::DeformedSis: return "deformed-sis";
  }
  return "?";
}

std::string_view chart_name(Chart c) {
  switch (c) {
    case Chart::Canonical: return "xy";
    case Chart::Epidemic: return "qp";
    case Chart::Moments: return "moments";
  }
  return "?";
}

Chart chart_of(Model m) {
  switch (m) {
    case Model::BookCanonical:
    case Model::DeformedBook: return Chart::Canonical;
    case Model::Moments: return Chart::Moments;
    default: return Chart::Epidemic;
  }
}

bool is_deformed(Model m) { return m == Model::DeformedBook || m == Model::DeformedSis; }

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(n_samples);
  const double span = t_end - t_start;
  for (std::size_t i = 0; i < n_samples; ++i) {
    out[i] = i + 1 == n_samples
                 ? t_end
                 : t_start + span * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  }
  return out;
}

Scenario parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ScenarioError("scenario must be a JSON object");
  reject_unknown_keys(root,
                      {"name", "model", "coefficients", "z", "a", "initial", "grid", "tolerances",
                       "seed"},
                      "scenario");

  Scenario sc;
  if (root.contains("name")) {
    if (!root.at("name").is_string()) throw ScenarioError("'name' must be text");
    sc.name = root.at("name").get<std::string>();
  }
  if (!root.contains("model") || !root.at("model").is_string()) {
    throw ScenarioError("scenario: missing 'model'");
  }
  sc.model = parse_model(root.at("model").get<std::string>());

  // Coefficients.
  if (!root.contains("coefficients") || !root.at("coefficients").is_object()) {
    throw ScenarioError("scenario: missing 'coefficients' object");
  }
  const json& coeffs = root.at("coefficients");
  const auto [first_name, second_name] = coefficient_names(sc.model);
  if (!coeffs.contains(first_name)) {
    throw ScenarioError(std::string("coefficients: missing '") + first_name + "'");
  }
  sc.first = parse_coefficient(coeffs.at(first_name), first_name);
  if (second_name) {
    if (!coeffs.contains(second_name)) {
      throw ScenarioError(std::string("coefficients: missing '") + second_name + "'");
    }
    sc.second = parse_coefficient(coeffs.at(second_name), second_name);
    reject_unknown_keys(coeffs, {first_name, second_name}, "coefficients");
  } else {
    if (coeffs.contains("b")) {
      const CoefficientFunction b = parse_coefficient(coeffs.at("b"), "b");
      if (!b.is_constant() || b(0.0) != 1.0) {
        throw ScenarioError(std::string(model_name(sc.model)) + " requires b = 1");
      }
    }
    reject_unknown_keys(coeffs, {first_name, "b"}, "coefficients");
    if (!sc.first.is_constant()) {
      throw ScenarioError(std::string(model_name(sc.model)) + " requires a constant rho0");
    }
  }

  sc.z = optional_number(root, "z", 0.0, "scenario");
  if (sc.z != 0.0 && !is_deformed(sc.model)) {
    throw ScenarioError("z is only meaningful for deformed models");
  }

  // Grid.
  if (!root.contains("grid") || !root.at("grid").is_object()) {
    throw ScenarioError("scenario: missing 'grid'");
  }
  const json& grid = root.at("grid");
  reject_unknown_keys(grid, {"t_start", "t_end", "n_samples"}, "grid");
  sc.grid.t_start = number_field(grid, "t_start", "grid");
  sc.grid.t_end = number_field(grid, "t_end", "grid");
  if (!grid.contains("n_samples") || !grid.at("n_samples").is_number_integer() ||
      grid.at("n_samples").get<long long>() < 2) {
    throw ScenarioError("grid: 'n_samples' must be an integer >= 2");
  }
  sc.grid.n_samples = grid.at("n_samples").get<std::size_t>();
  if (!(sc.grid.t_end > sc.grid.t_start)) throw ScenarioError("grid: t_end must exceed t_start");

  sc.a = optional_number(root, "a", sc.grid.t_start, "scenario");
  if (sc.a > sc.grid.t_start) throw ScenarioError("base point a must not exceed grid.t_start");

  // Initial state.
  if (!root.contains("initial") || !root.at("initial").is_object()) {
    throw ScenarioError("scenario: missing 'initial'");
  }
  const json& init = root.at("initial");
  reject_unknown_keys(init, {"chart", "values"}, "initial");
  if (!init.contains("chart") || !init.at("chart").is_string()) {
    throw ScenarioError("initial: missing 'chart'");
  }
  const std::string chart = init.at("chart").get<std::string>();
  if (chart != chart_name(chart_of(sc.model))) {
    throw ScenarioError("initial: chart '" + chart + "' does not match model " +
                        std::string(model_name(sc.model)) + " (expected '" +
                        std::string(chart_name(chart_of(sc.model))) + "')");
  }
  if (!init.contains("values") || !init.at("values").is_array() ||
      init.at("values").size() != 2) {
    throw ScenarioError("initial: 'values' must hold two entries");
  }
  sc.initial = {parse_initial_value(init.at("values")[0]),
                parse_initial_value(init.at("values")[1])};

  if (root.contains("tolerances")) {
    const json& tol = root.at("tolerances");
    if (!tol.is_object()) throw ScenarioError("'tolerances' must be an object");
    reject_unknown_keys(tol, {"quadrature", "deviation", "rtol", "atol", "rk4_step"},
                        "tolerances");
    sc.tol.quadrature = optional_number(tol, "quadrature", sc.tol.quadrature, "tolerances");
    sc.tol.deviation = optional_number(tol, "deviation", sc.tol.deviation, "tolerances");
    sc.tol.rtol = optional_number(tol, "rtol", sc.tol.rtol, "tolerances");
    sc.tol.atol = optional_number(tol, "atol", sc.tol.atol, "tolerances");
    sc.tol.rk4_step = optional_number(tol, "rk4_step", sc.tol.rk4_step, "tolerances");
    for (double v : {sc.tol.quadrature, sc.tol.deviation, sc.tol.rtol, sc.tol.atol,
                     sc.tol.rk4_step}) {
      if (!(v > 0.0)) throw ScenarioError("tolerances must be positive");
    }
  }
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned()) {
      throw ScenarioError("'seed' must be a non-negative integer");
    }
    sc.seed = root.at("seed").get<std::uint64_t>();
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario sc = parse_scenario(buf.str());
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

double scaled_deviation(const Vec2& a, const Vec2& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double d = std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i]));
    worst = std::max(worst, std::isnan(d) ? std::numeric_limits<double>::infinity() : d);
  }
  return worst;
}

ValidityWindow scenario_window(const Scenario& sc) { return make_adapter(sc)->window; }

double residual_at(const Scenario& sc, double t) {
  auto model = make_adapter(sc);
  return finite_difference_residual(*model, t);
}

RunReport run_scenario(const Scenario& sc, const RunOptions& opts) {
  RunReport report;
  report.tolerance = opts.deviation_tol.value_or(sc.tol.deviation);

  std::unique_ptr<ModelAdapter> model;
  try {
    model = make_adapter(sc);
  } catch (const DomainError& e) {
    report.status = RunStatus::DomainExit;
    report.failing_time = sc.a;
    report.message = e.what();
    return report;
  }
  Trajectory& traj = report.trajectory;
  traj.metadata.constants = model->constants;
  traj.metadata.window = model->window;
  traj.metadata.method = opts.method;

  std::vector<double> times = sc.grid.times();
  if (model->window.bounded()) {
    const double t_max = model->window.t_max;
    std::erase_if(times, [t_max](double t) { return t >= t_max; });
    report.status = RunStatus::DomainExit;
    report.failing_time = t_max;
    report.message = "grid crosses the validity window boundary t_max=" + format_double(t_max);
  }

  IntegratorConfig cfg;
  cfg.method = opts.method;
  cfg.rtol = sc.tol.rtol;
  cfg.atol = sc.tol.atol;
  cfg.step = sc.tol.rk4_step;
  OdeTrajectory numeric;
  if (!times.empty()) {
    OdeProblem problem{ode_rhs(*model), sc.a, {sc.initial[0], sc.initial[1]}, times.back()};
    try {
      numeric = integrate_ode(problem, cfg, times);
    } catch (const OdeError& e) {
      const double last = e.last_good_time();
      report.status = RunStatus::DomainExit;
      report.failing_time = last;
      report.message = std::string("numerical integration stopped: ") + e.what();
      std::erase_if(times, [last](double t) { return t > last; });
      problem.t_end = times.empty() ? sc.a : times.back();
      numeric = times.empty() ? OdeTrajectory{} : integrate_ode(problem, cfg, times);
    }
  }
  traj.metadata.stats = numeric.stats;

  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    Sample s;
    s.t = t;
    try {
      s.exact = model->exact(t);
      s.residual = residual_at(sc, t);
    } catch (const DomainError& e) {
      report.status = RunStatus::DomainExit;
      report.failing_time = t;
      report.message = e.what();
      break;
    }
    s.numeric = {numeric.states[i][0], numeric.states[i][1]};
    s.images = model->images(s.exact);
    s.deviation = scaled_deviation(s.exact, s.numeric);
    s.physical = model->physical(s.exact);
    report.max_deviation = std::max(report.max_deviation, s.deviation);
    report.max_residual = std::max(report.max_residual, s.residual);
    traj.samples.push_back(std::move(s));
  }

  if (report.status != RunStatus::DomainExit) {
    if (report.max_deviation > report.tolerance) {
      report.status = RunStatus::ToleranceViolation;
      report.message = "max deviation " + format_double(report.max_deviation) +
                       " exceeds tolerance " + format_double(report.tolerance);
    } else {
      report.message = "ok";
    }
  }
  return report;
}

std::vector<std::string> csv_header(Model m) {
  switch (chart_of(m)) {
    case Chart::Canonical:
      return {"t", "x", "y", "x_numeric", "y_numeric", "q", "p", "deviation", "residual",
              "physical"};
    case Chart::Epidemic:
      return {"t", "q", "p", "q_numeric", "p_numeric", "x", "y", "deviation", "residual",
              "physical"};
    case Chart::Moments:
      return {"t", "mean", "variance", "mean_numeric", "variance_numeric", "q", "p",
              "deviation", "residual", "physical"};
  }
  return {};
}

void write_csv(std::ostream& os, const Scenario& sc, const Trajectory& traj) {
  const auto header = csv_header(sc.model);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const Sample& s : traj.samples) {
    os << csv_number(s.t) << ',' << csv_number(s.exact[0]) << ',' << csv_number(s.exact[1])
       << ',' << csv_number(s.numeric[0]) << ',' << csv_number(s.numeric[1]);
    for (double v : s.images) os << ',' << csv_number(v);
    os << ',' << csv_number(s.deviation) << ',' << csv_number(s.residual) << ','
       << (s.physical ? 1 : 0) << '\n';
  }
}

std::string report_json(const Scenario& sc, const RunReport& report) {
  const auto& meta = report.trajectory.metadata;
  json j;
  j["scenario"] = sc.name;
  j["model"] = std::string(model_name(sc.model));
  j["z"] = sc.z;
  j["a"] = sc.a;
  j["seed"] = sc.seed;
  j["status"] = static_cast<int>(report.status);
  j["message"] = report.message;
  j["max_deviation"] = json_number(report.max_deviation);
  j["max_residual"] = json_number(report.max_residual);
  j["tolerance"] = report.tolerance;
  j["failing_time"] = report.failing_time ? json_number(*report.failing_time) : json(nullptr);
  j["constants"] = {{"c1", meta.constants.c1}, {"c2", meta.constants.c2}};
  j["validity_window"] = {{"t_max", json_number(meta.window.t_max)}};
  j["solver"] = {
      {"method", meta.method == OdeMethod::FixedRk4 ? "fixed" : "adaptive"},
      {"accepted_steps", meta.stats.accepted},
      {"rejected_steps", meta.stats.rejected},
      {"rhs_evaluations", meta.stats.rhs_evaluations},
  };
  j["samples"] = report.trajectory.samples.size();
  j["coefficients"] = {{"first", sc.first.describe()}, {"second", sc.second.describe()}};
  return j.dump(2);
}

std::vector<CompareRow> compare_scenario(const Scenario& sc, std::span<const double> z_sweep) {
  if (!is_deformed(sc.model)) throw ScenarioError("compare requires a deformed model");
  std::vector<double> zs(z_sweep.begin(), z_sweep.end());
  if (zs.empty()) zs = {sc.z, sc.z / 2.0, sc.z / 4.0};

  const std::vector<double> times = sc.grid.times();
  IntegratorConfig cfg;
  cfg.rtol = std::min(sc.tol.rtol, 1e-12);
  cfg.atol = std::min(sc.tol.atol, 1e-14);
  const StateVector y0{sc.initial[0], sc.initial[1]};

  auto solve = [&](OdeRhs f) {
    return integrate_ode(OdeProblem{std::move(f), sc.a, y0, times.back()}, cfg, times);
  };
  auto max_dev = [](const OdeTrajectory& u, const OdeTrajectory& v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.states.size(); ++i) {
      worst = std::max(worst, scaled_deviation({u.states[i][0], u.states[i][1]},
                                               {v.states[i][0], v.states[i][1]}));
    }
    return worst;
  };

  std::vector<CompareRow> rows;
  for (const double z : zs) {
    Scenario at_z = sc;
    at_z.z = z;
    const ValidityWindow window = scenario_window(at_z);
    if (window.bounded()) {
      throw ValidityWindowError("z=" + format_double(z) +
                                    " leaves the validity window at t_max=" +
                                    format_double(window.t_max),
                                window.t_max, window.t_max);
    }
    OdeTrajectory full, first, classical;
    if (sc.model == Model::DeformedBook) {
      const DeformedBookSystem sys{{sc.first, sc.second, sc.a}, z};
      full = solve([sys](double t, const StateVector& y) {
        const Vec2 d = deformed_rhs(sys, t, {y[0], y[1]});
        return StateVector{d[0], d[1]};
      });
      first = solve([sys](double t, const StateVector& y) {
        const Vec2 d = perturbed_rhs_first_order(sys, t, CanonicalState{y[0], y[1]});
        return StateVector{d[0], d[1]};
      });
      classical = solve([sys](double t, const StateVector& y) {
        const Vec2 d = rhs(sys.base, t, {y[0], y[1]});
        return StateVector{d[0], d[1]};
      });
    } else {
      const DeformedSisSystem sys{{sc.first, sc.second, sc.a}, z};
      full = solve([sys](double t, const StateVector& y) {
        const Vec2 d = deformed_sis_rhs(sys, t, {y[0], y[1]});
        return StateVector{d[0], d[1]};
      });
      first = solve([sys](double t, const StateVector& y) {
        const Vec2 d = perturbed_rhs_first_order(sys, t, EpidemicState{y[0], y[1]});
        return StateVector{d[0], d[1]};
      });
      classical = solve([sys](double t, const StateVector& y) {
        const Vec2 d = sis_rhs(sys.base, t, {y[0], y[1]});
        return StateVector{d[0], d[1]};
      });
    }
    CompareRow row;
    row.z = z;
    row.deformed_vs_classical = max_dev(full, classical);
    row.first_order_vs_deformed = max_dev(first, full);
    row.first_order_vs_classical = max_dev(first, classical);
    row.classical_order = kNaN;
    row.first_order_order = kNaN;
    if (!rows.empty()) {
      const CompareRow& prev = rows.back();
      const double scale = std::log(std::abs(prev.z / z));
      row.classical_order = std::log(prev.deformed_vs_classical / row.deformed_vs_classical) / scale;
      row.first_order_order =
          std::log(prev.first_order_vs_deformed / row.first_order_vs_deformed) / scale;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_compare_csv(std::ostream& os, std::span<const CompareRow> rows) {
  os << "z,deformed_vs_classical,classical_order,first_order_vs_deformed,first_order_order,"
        "first_order_vs_classical\n";
  for (const CompareRow& r : rows) {
    os << csv_number(r.z) << ',' << csv_number(r.deformed_vs_classical) << ','
       << csv_number(r.classical_order) << ',' << csv_number(r.first_order_vs_deformed) << ','
       << csv_number(r.first_order_order) << ',' << csv_number(r.first_order_vs_classical)
       << '\n';
  }
}

}  // namespace lhsis
