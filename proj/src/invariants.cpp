#include "lhsis/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lhsis/canonical.hpp"
#include "lhsis/deformed.hpp"
#include "lhsis/errors.hpp"
#include "lhsis/scenario.hpp"
#include "lhsis/sis.hpp"

namespace lhsis {

namespace {

constexpr double kStructureStep = 1e-5;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

InvariantResult finish(std::string name, std::size_t cases, double worst, double threshold) {
  return {std::move(name), cases, worst, threshold, worst <= threshold};
}

ExprPtr random_tree(std::mt19937_64& rng, int depth) {
  const int pick = std::uniform_int_distribution<int>(0, depth > 0 ? 5 : 1)(rng);
  switch (pick) {
    case 0: return make_number(std::round(uniform(rng, -50.0, 50.0)) / 8.0);
    case 1: return make_variable();
    case 2:
      return make_unary(UnaryOp::Negate, random_tree(rng, depth - 1));
    case 3: {
      const auto fn = static_cast<Function>(std::uniform_int_distribution<int>(0, 4)(rng));
      return make_call(fn, random_tree(rng, depth - 1));
    }
    default: {
      const auto op = static_cast<BinaryOp>(std::uniform_int_distribution<int>(0, 4)(rng));
      return make_binary(op, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    }
  }
}

// q in (0, 3], p in (0, 3], away from q^2 p^2 = 1.
EpidemicState random_epidemic_state(std::mt19937_64& rng) {
  for (;;) {
    const EpidemicState s{uniform(rng, 0.05, 3.0), uniform(rng, 0.05, 3.0)};
    if (std::abs(s.q * s.q * s.p * s.p - 1.0) > 0.05) return s;
  }
}

CanonicalState random_canonical_state(std::mt19937_64& rng) {
  return {uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
}

}  // namespace

CoefficientFunction random_builtin(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return CoefficientFunction::constant(uniform(rng, -2.0, 2.0));
    case 1: {
      const double slope = uniform(rng, -2.0, 2.0);
      return CoefficientFunction::linear(slope, uniform(rng, -2.0, 2.0));
    }
    default: {
      const double mean = uniform(rng, -2.0, 2.0);
      const double amplitude = uniform(rng, -1.0, 1.0);
      const double frequency = uniform(rng, 0.1, 2.0);
      return CoefficientFunction::sinusoidal(mean, amplitude, frequency,
                                             uniform(rng, -std::numbers::pi, std::numbers::pi));
    }
  }
}

InvariantResult check_builtin_equivalence(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const CoefficientFunction f = random_builtin(rng);
    const ExprPtr tree = f.to_expression();
    const double t = uniform(rng, -10.0, 10.0);
    const double direct = f(t);
    const double via_tree = evaluate(*tree, t);
    worst = std::max(worst, std::abs(direct - via_tree) /
                                std::max(std::abs(direct), std::numeric_limits<double>::min()));
  }
  return finish("builtin families vs expression trees (rel)", count, worst, 1e-15);
}

InvariantResult check_print_round_trip(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double failures = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const ExprPtr tree = random_tree(rng, 4);
    const ExprPtr back = parse_expression(to_string(*tree));
    if (!structurally_equal(*tree, *back)) failures += 1.0;
  }
  return finish("print/parse round trip (failures)", count, failures, 0.0);
}

InvariantResult check_chart_round_trip(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const EpidemicState s = random_epidemic_state(rng);
    const EpidemicState back = from_canonical(to_canonical(s));
    worst = std::max({worst, std::abs(back.q - s.q) / std::abs(s.q),
                      std::abs(back.p - s.p) / std::abs(s.p)});
  }
  return finish("chart round trip (rel)", count, worst, 1e-12);
}

InvariantResult check_canonicity(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const EpidemicState s = random_epidemic_state(rng);
    // Step relative to the distance from the singular locus and the axes.
    const double d = s.q * s.q * s.p * s.p - 1.0;
    const double scale = std::min(
        {std::abs(d) / (2.0 * s.q * s.p * std::max(s.q, s.p)), s.q, s.p});
    const double h = kStructureStep * scale;
    const CanonicalState qp = to_canonical({s.q + h, s.p});
    const CanonicalState qm = to_canonical({s.q - h, s.p});
    const CanonicalState pp = to_canonical({s.q, s.p + h});
    const CanonicalState pm = to_canonical({s.q, s.p - h});
    const double xq = (qp.x - qm.x) / (2.0 * h), yq = (qp.y - qm.y) / (2.0 * h);
    const double xp = (pp.x - pm.x) / (2.0 * h), yp = (pp.y - pm.y) / (2.0 * h);
    worst = std::max(worst, std::abs(xq * yp - xp * yq - 1.0));
  }
  return finish("chart Jacobian determinant", count, worst, 1e-6);
}

InvariantResult check_book_bracket(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const CanonicalState s = random_canonical_state(rng);
    const double bracket = poisson_bracket(hamiltonian_a, hamiltonian_b, s, kStructureStep);
    worst = std::max(worst, std::abs(bracket + hamiltonian_b(s)));
  }
  return finish("{h_A, h_B} + h_B", count, worst, 1e-6);
}

InvariantResult check_book_commutator(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const CanonicalState s = random_canonical_state(rng);
    const Vec2 c = vf_commutator(field_a, field_b, s, kStructureStep);
    const Vec2 b = field_b(s);
    worst = std::max({worst, std::abs(c[0] - b[0]), std::abs(c[1] - b[1])});
  }
  return finish("[X_A, X_B] - X_B", count, worst, 1e-6);
}

InvariantResult check_deformed_bracket(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double z = i % 2 == 0 ? 0.1 : 1.0;
    worst = std::max(worst,
                     deformed_poisson_bracket_check(z, random_canonical_state(rng), kStructureStep));
  }
  return finish("deformed bracket relation (z = 0.1, 1)", count, worst, 1e-6);
}

InvariantResult check_deformed_commutator(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double z = i % 2 == 0 ? 0.1 : 1.0;
    worst = std::max(worst,
                     deformed_commutator_defect(z, random_canonical_state(rng), kStructureStep));
  }
  return finish("deformed commutator relation (z = 0.1, 1)", count, worst, 1e-6);
}

InvariantResult check_moment_pushforward(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double rho0 = uniform(rng, 0.2, 3.0);
    const EpidemicState s{uniform(rng, 0.05, 3.0), uniform(rng, 0.2, 3.0)};
    const SisSystem sys{CoefficientFunction::constant(rho0), CoefficientFunction::constant(1.0),
                        0.0};
    const Vec2 d = sis_rhs(sys, 0.0, s);
    // d(1/p^2) = -2 dp / p^3
    const Vec2 pushed{d[0], -2.0 * d[1] / (s.p * s.p * s.p)};
    worst = std::max(worst, scaled_deviation(moment_rhs(rho0, moments_from_state(s)), pushed));
  }
  return finish("moment equations vs SIS pushforward", count, worst, 1e-5);
}

InvariantResult check_exact_residual(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  constexpr int kTimes = 20;
  for (std::size_t i = 0; i < count; ++i) {
    const BookSystem sys{random_builtin(rng), random_builtin(rng), 0.0};
    const IntegrationConstants c{uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
    BookSolution solution(sys, c);
    for (int k = 1; k <= kTimes; ++k) {
      const double t = 5.0 * k / (kTimes + 1);
      const double h = 1e-4 * std::max(1.0, t);
      const CanonicalState ahead = solution(t + h);
      const CanonicalState behind = solution(t - h);
      const Vec2 slope{(ahead.x - behind.x) / (2.0 * h), (ahead.y - behind.y) / (2.0 * h)};
      worst = std::max(worst, scaled_deviation(slope, rhs(sys, t, solution(t))));
    }
  }
  return finish("exact solution residual", count, worst, 1e-5);
}

InvariantResult check_exact_vs_oracle(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    Scenario sc;
    sc.name = "random-" + std::to_string(i);
    sc.model = Model::BookCanonical;
    sc.first = random_builtin(rng);
    sc.second = random_builtin(rng);
    sc.a = 0.0;
    sc.initial = {uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
    sc.grid = {0.0, 5.0, 51};
    sc.seed = seed;
    for (OdeMethod method : {OdeMethod::AdaptiveDormandPrince, OdeMethod::FixedRk4}) {
      const RunReport report = run_scenario(sc, {method, std::nullopt});
      if (report.status == RunStatus::DomainExit) {
        worst = std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, report.max_deviation);
    }
  }
  return finish("exact vs both integrators (book, random)", count, worst, 1e-6);
}

std::vector<InvariantResult> run_invariants(std::uint64_t seed, std::size_t count) {
  const std::size_t scenarios = std::max<std::size_t>(1, count / 10);
  return {
      check_builtin_equivalence(seed, count),
      check_print_round_trip(seed + 1, count),
      check_chart_round_trip(seed + 2, count),
      check_canonicity(seed + 3, count),
      check_book_bracket(seed + 4, count),
      check_book_commutator(seed + 5, count),
      check_deformed_bracket(seed + 6, count),
      check_deformed_commutator(seed + 7, count),
      check_moment_pushforward(seed + 8, count),
      check_exact_residual(seed + 9, scenarios),
      check_exact_vs_oracle(seed + 10, scenarios),
  };
}

}  // namespace lhsis
