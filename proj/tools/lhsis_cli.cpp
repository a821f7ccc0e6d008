#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lhsis/errors.hpp"
#include "lhsis/invariants.hpp"
#include "lhsis/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

struct Options {
  std::string scenario;
  std::optional<double> tol;
  std::string method = "adaptive";
  std::string output;
  std::string format = "csv";
  std::vector<double> z_sweep;
  std::uint64_t seed = 0;
  std::size_t count = 1000;
};

std::ofstream open_output(const Options& opt, const std::string& file) {
  fs::create_directories(opt.output);
  const fs::path path = fs::path(opt.output) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lhsis::Error("cannot write " + path.string());
  return out;
}

std::string stem(const lhsis::Scenario& sc) { return sc.name.empty() ? "scenario" : sc.name; }

int run(const Options& opt) {
  const lhsis::Scenario sc = lhsis::load_scenario(opt.scenario);
  lhsis::RunOptions ro;
  ro.method = opt.method == "fixed" ? lhsis::OdeMethod::FixedRk4
                                    : lhsis::OdeMethod::AdaptiveDormandPrince;
  ro.deviation_tol = opt.tol;
  const lhsis::RunReport report = lhsis::run_scenario(sc, ro);

  if (opt.output.empty()) {
    lhsis::write_csv(std::cout, sc, report.trajectory);
  } else {
    auto csv = open_output(opt, stem(sc) + ".csv");
    lhsis::write_csv(csv, sc, report.trajectory);
    auto json = open_output(opt, stem(sc) + ".report.json");
    json << lhsis::report_json(sc, report) << '\n';
  }
  std::cerr << stem(sc) << ": " << report.message << " (max deviation "
            << report.max_deviation << ", max residual " << report.max_residual << ")\n";
  if (report.failing_time) std::cerr << "first failing t = " << std::setprecision(17)
                                     << *report.failing_time << '\n';
  return static_cast<int>(report.status);
}

int compare(const Options& opt) {
  const lhsis::Scenario sc = lhsis::load_scenario(opt.scenario);
  const auto rows = lhsis::compare_scenario(sc, opt.z_sweep);
  if (opt.output.empty()) {
    lhsis::write_compare_csv(std::cout, rows);
  } else {
    auto out = open_output(opt, stem(sc) + ".compare.csv");
    lhsis::write_compare_csv(out, rows);
  }
  return kExitPass;
}

int window(const Options& opt) {
  const lhsis::Scenario sc = lhsis::load_scenario(opt.scenario);
  const lhsis::ValidityWindow w = lhsis::scenario_window(sc);
  if (w.bounded()) {
    std::cout << "t_max " << std::setprecision(17) << w.t_max << '\n';
  } else {
    std::cout << "t_max unbounded on [" << sc.a << ", " << sc.grid.t_end << "]\n";
  }
  return kExitPass;
}

int invariants(const Options& opt) {
  const auto results = lhsis::run_invariants(opt.seed, opt.count);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(46) << r.name
              << " cases=" << r.cases << " worst=" << std::setprecision(3) << r.worst
              << " threshold=" << r.threshold << '\n';
    ok = ok && r.passed;
  }
  return ok ? kExitPass : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and numerical solutions of time-dependent SIS and book-algebra systems"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--tol", opt.tol, "Deviation tolerance (overrides the scenario)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--method", opt.method, "Numerical integrator")
        ->check(CLI::IsMember({"fixed", "adaptive"}));
    sub->add_option("--output", opt.output, "Directory for output files (default: stdout)");
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv"}));
  };

  auto* run_cmd = app.add_subcommand("run", "Compare the exact solution with an integrator");
  run_cmd->add_option("scenario", opt.scenario, "Scenario JSON file")->required();
  add_common(run_cmd);

  auto* compare_cmd =
      app.add_subcommand("compare", "Deformed vs first-order vs classical over a z sweep");
  compare_cmd->add_option("scenario", opt.scenario, "Scenario JSON file")->required();
  compare_cmd->add_option("--z-sweep", opt.z_sweep, "Comma-separated z values")->delimiter(',');
  add_common(compare_cmd);

  auto* window_cmd = app.add_subcommand("window", "Validity window of a deformed scenario");
  window_cmd->add_option("scenario", opt.scenario, "Scenario JSON file")->required();

  auto* inv_cmd = app.add_subcommand("invariants", "Randomized property checks");
  inv_cmd->add_option("--seed", opt.seed, "Random seed");
  inv_cmd->add_option("--count", opt.count, "Cases per suite")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    if (*run_cmd) return run(opt);
    if (*compare_cmd) return compare(opt);
    if (*window_cmd) return window(opt);
    if (*inv_cmd) return invariants(opt);
  } catch (const lhsis::ParseError& e) {
    std::cerr << "input error: " << e.what() << " (offset " << e.offset() << ")\n";
    return kExitInput;
  } catch (const lhsis::ScenarioError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const lhsis::DomainError& e) {
    std::cerr << "domain exit at t = " << std::setprecision(17) << e.time() << ": " << e.what()
              << '\n';
    return kExitDomain;
  } catch (const lhsis::QuadratureError& e) {
    std::cerr << "domain exit: " << e.what() << '\n';
    return kExitDomain;
  } catch (const lhsis::OdeError& e) {
    std::cerr << "domain exit: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
