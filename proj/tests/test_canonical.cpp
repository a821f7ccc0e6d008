#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lhsis/canonical.hpp"
#include "lhsis/errors.hpp"
#include "lhsis/invariants.hpp"
#include "lhsis/oracle.hpp"

using namespace lhsis;

namespace {

BookSystem constant_system(double bA, double bB, double a = 0.0) {
  return {CoefficientFunction::constant(bA), CoefficientFunction::constant(bB), a};
}

StateVector rk45(const BookSystem& sys, CanonicalState s0, double t) {
  const OdeRhs f = [&sys](double u, const StateVector& y) {
    const Vec2 d = rhs(sys, u, {y[0], y[1]});
    return StateVector{d[0], d[1]};
  };
  const std::vector<double> times{t};
  return integrate_ode({f, sys.a, {s0.x, s0.y}, t}, {}, times).states.back();
}

}  // namespace

TEST_CASE("hamiltonian") {
  CHECK(hamiltonian(constant_system(1, 1), 0.3, {1, 2}) == 1.0);
  CHECK(hamiltonian(constant_system(0.7, -2), 4.0, {0, 9}) == 0.0);
  CHECK(hamiltonian(constant_system(0, 3), 1.0, {2, 5}) == -6.0);
}

TEST_CASE("right-hand side") {
  const Vec2 zero = rhs(constant_system(0, 0), 2.0, {4, -1});
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
  const Vec2 dil = rhs(constant_system(1, 0), 0.0, {2, 3});
  CHECK(dil[0] == 2.0);
  CHECK(dil[1] == -3.0);
  const Vec2 mixed = rhs(constant_system(1, 1), 0.0, {1, 1});
  CHECK(mixed[0] == 1.0);
  CHECK(mixed[1] == 0.0);
}

TEST_CASE("exact solution") {
  const IntegrationConstants c{1.25, -0.5};
  const BookSystem seasonal{CoefficientFunction::parse("1 + 0.5*sin(t)"),
                            CoefficientFunction::constant(1.0), 0.0};
  const CanonicalState at_a = exact_solution(seasonal, c, 0.0);
  CHECK(at_a.x == c.c1);
  CHECK(at_a.y == c.c2);

  const CanonicalState frozen = exact_solution(constant_system(0, 0), c, 7.0);
  CHECK(frozen.x == c.c1);
  CHECK(frozen.y == c.c2);

  const CanonicalState unit = exact_solution(constant_system(1, 1), {1, 1}, 1.0);
  CHECK(std::abs(unit.x - std::numbers::e) < 1e-12);
  CHECK(std::abs(unit.y - 1.0) < 1e-12);

  const CanonicalState s = exact_solution(seasonal, {1, 1}, 2.0);
  const StateVector ref = rk45(seasonal, {1, 1}, 2.0);
  CHECK(std::abs(s.x - ref[0]) < 1e-6);
  CHECK(std::abs(s.y - ref[1]) < 1e-6);
}

TEST_CASE("exact solution against an independent quadrature") {
  // Theta = t + (1 - cos t)/2 in closed form; the weighted integral by Simpson.
  const BookSystem sys{CoefficientFunction::parse("1 + 0.5*sin(t)"),
                       CoefficientFunction::parse("exp(-t)"), 0.0};
  auto theta = [](double t) { return t + 0.5 * (1.0 - std::cos(t)); };
  auto g = [&](double u) { return std::exp(theta(u) - u); };
  BookSolution sol(sys, {0.8, 0.3});
  for (double t : {0.5, 1.0, 2.5, 4.0}) {
    const int n = 40000;
    const double h = t / n;
    double sum = g(0.0) + g(t);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
    const CanonicalState s = sol(t);
    CHECK(std::abs(s.x - 0.8 * std::exp(theta(t))) < 1e-9 * std::exp(theta(t)));
    CHECK(std::abs(s.y - (0.3 + sum * h / 3.0) * std::exp(-theta(t))) < 1e-10);
  }
}

TEST_CASE("base point other than zero") {
  const BookSystem sys = constant_system(0.5, 2.0, 1.0);
  BookSolution sol(sys, fit_constants(sys, 1.0, {2.0, 1.0}));
  // x = 2 e^{(t-1)/2},  y = (1 + 4 (e^{(t-1)/2} - 1)) e^{-(t-1)/2}
  const double e = std::exp(1.0);
  CHECK(std::abs(sol(3.0).x - 2.0 * e) < 1e-12);
  CHECK(std::abs(sol(3.0).y - (1.0 + 4.0 * (e - 1.0)) / e) < 1e-12);
}

TEST_CASE("fit constants") {
  const BookSystem sys = constant_system(1, 1);
  const IntegrationConstants c = fit_constants(sys, 0.0, {1, 2});
  CHECK(c.c1 == 1.0);
  CHECK(c.c2 == 2.0);
  const IntegrationConstants zero = fit_constants(sys, 0.0, {0, 5});
  CHECK(exact_solution(sys, zero, 3.0).x == 0.0);
  CHECK(fit_constants(sys, 0.0, {-1, 0}).c1 == -1.0);
  CHECK_THROWS_AS(fit_constants(sys, 0.5, {1, 2}), Error);
}

TEST_CASE("coefficient domain must contain the base point") {
  const BookSystem sys{CoefficientFunction::parse("ln(t)", Interval{1.0, 5.0}),
                       CoefficientFunction::constant(1.0), 0.0};
  CHECK_THROWS_AS(BookSolution(sys, {1, 1}), Error);
}

TEST_CASE("poisson bracket") {
  const double h = 1e-5;
  CHECK(poisson_bracket(hamiltonian_a, hamiltonian_b, {1, 2}, h) == doctest::Approx(1.0));
  CHECK(poisson_bracket(hamiltonian_a, hamiltonian_a, {0.3, -2}, h) == 0.0);
  auto x = [](CanonicalState s) { return s.x; };
  auto y = [](CanonicalState s) { return s.y; };
  CHECK(poisson_bracket(x, y, {3, -4}, h) == doctest::Approx(1.0));
  CHECK_THROWS_AS(poisson_bracket(x, y, {3, -4}, 0.0), std::invalid_argument);
}

TEST_CASE("vector field commutator") {
  const double h = 1e-5;
  const Vec2 c = vf_commutator(field_a, field_b, {1, 1}, h);
  CHECK(std::abs(c[0]) < 1e-10);
  CHECK(std::abs(c[1] - 1.0) < 1e-10);
  const Vec2 same = vf_commutator(field_b, field_b, {1, 1}, h);
  CHECK(same[0] == 0.0);
  CHECK(same[1] == 0.0);
  const Vec2 aa = vf_commutator(field_a, field_a, {0.4, -1.5}, h);
  CHECK(aa[0] == 0.0);
  CHECK(aa[1] == 0.0);
}

TEST_CASE("structure relations at random states") {
  CHECK(check_book_bracket(11, 1000).passed);
  CHECK(check_book_commutator(12, 1000).passed);
}

TEST_CASE("exact solution residual on random scenarios") {
  const InvariantResult r = check_exact_residual(13, 100);
  CAPTURE(r.worst);
  CHECK(r.passed);
}
