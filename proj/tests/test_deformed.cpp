#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "lhsis/deformed.hpp"
#include "lhsis/errors.hpp"
#include "lhsis/invariants.hpp"
#include "lhsis/oracle.hpp"

using namespace lhsis;

namespace {

CoefficientFunction cst(double v) { return CoefficientFunction::constant(v); }

DeformedBookSystem deformed_book(double bA, double bB, double z) {
  return {{cst(bA), cst(bB), 0.0}, z};
}

const CoefficientFunction kSeasonal = CoefficientFunction::parse("1 + 0.5*sin(t)");

template <class Rhs>
OdeTrajectory rk45(Rhs f, double t0, Vec2 s0, const std::vector<double>& times) {
  const OdeRhs g = [f](double u, const StateVector& y) {
    const Vec2 d = f(u, Vec2{y[0], y[1]});
    return StateVector{d[0], d[1]};
  };
  return integrate_ode({g, t0, {s0[0], s0[1]}, times.back()}, {}, times);
}

// The deformed SIS equations transcribed term by term as displayed.
Vec2 displayed_deformed_sis(double rho0, double b, double z, double q, double p) {
  const double qp2 = q * q * p * p;
  const double E = std::exp(z * (qp2 - 1.0) / p);
  const double den = z * (qp2 - 1.0) * (qp2 - 1.0);
  const double dq = rho0 * q * (2.0 * p - (2.0 * p + z - z * qp2 * qp2) * E) / den -
                    b * (q * q + 1.0 / (p * p));
  const double dp =
      -rho0 * p * p * (1.0 + qp2 - (1.0 + qp2 + 2.0 * z * q * q * p * (1.0 - qp2)) * E) / den +
      2.0 * b * q * p;
  return {dq, dp};
}

}  // namespace

TEST_CASE("stable kernels") {
  CHECK(expm1_ratio(0.0, 2.0) == 2.0);
  CHECK(expm1_ratio(1e-13, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(expm1_ratio(1.0, std::numbers::ln2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(expm1_ratio(-0.5, 1.0) == doctest::Approx(-2.0 * std::expm1(-0.5)).epsilon(1e-15));
  CHECK(log1p_ratio(0.0, 0.3) == 0.3);
  CHECK(log1p_ratio(1.0, 0.5) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  // Series and closed branches meet continuously at the switch.
  CHECK(expm1_ratio(1.0, 0.99e-8) == doctest::Approx(expm1_ratio(1.0, 1.01e-8)).epsilon(1e-7));
}

TEST_CASE("deformed hamiltonian") {
  CHECK(deformed_hamiltonian(deformed_book(1, 1, 1e-13), 0.0, {1, 2}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(deformed_hamiltonian(deformed_book(1, 0, 1.0), 0.0, {std::numbers::ln2, 1.0}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(deformed_hamiltonian(deformed_book(0.4, -3, 0.7), 0.0, {0.0, 2.0}) == 0.0);
}

TEST_CASE("deformed right-hand side") {
  const Vec2 a = deformed_rhs(deformed_book(1, 0, 1), 0.0, {0, 3});
  CHECK(a[0] == 0.0);
  CHECK(a[1] == -3.0);
  const Vec2 b = deformed_rhs(deformed_book(1, 1, 1), 0.0, {std::numbers::ln2, 1});
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(deformed_rhs(deformed_book(1, 1, 1), 0.0, {1e4, 1}), DomainError);
}

TEST_CASE("first-order truncation error is quadratic in z") {
  const CanonicalState s{0.8, -1.3};
  auto defect = [&](double z) {
    const DeformedBookSystem sys{{kSeasonal, cst(0.5), 0.0}, z};
    const Vec2 full = deformed_rhs(sys, 0.7, s);
    const Vec2 first = perturbed_rhs_first_order(sys, 0.7, s);
    return std::max(std::abs(full[0] - first[0]), std::abs(full[1] - first[1]));
  };
  const double ratio = defect(1e-3) / defect(5e-4);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));

  const Vec2 p = perturbed_rhs_first_order(deformed_book(1, 0, 0.1), 0.0, CanonicalState{1, 1});
  CHECK(p[0] == doctest::Approx(1.05));
  CHECK(p[1] == doctest::Approx(-1.1));
  const DeformedBookSystem classical = deformed_book(0.3, 2, 0.0);
  const Vec2 c0 = perturbed_rhs_first_order(classical, 0.0, CanonicalState{1.5, -2});
  const Vec2 c1 = rhs(classical.base, 0.0, {1.5, -2});
  CHECK(c0[0] == c1[0]);
  CHECK(c0[1] == c1[1]);
}

TEST_CASE("deformed exact solution") {
  const DeformedBookSystem sys{{kSeasonal, CoefficientFunction::parse("cos(t)"), 0.0}, 0.3};
  DeformedBookSolution sol(sys, {0.4, 1.5});
  const CanonicalState at_a = sol(0.0);
  CHECK(at_a.x == doctest::Approx(-std::log(1.0 - 0.3 * 0.4) / 0.3).epsilon(1e-15));
  CHECK(at_a.y == 1.5);

  // z -> 0 reproduces the classical solution.
  const DeformedBookSystem tiny{{kSeasonal, cst(1.0), 0.0}, 1e-13};
  DeformedBookSolution near(tiny, {1.0, 1.0});
  BookSolution classical(tiny.base, {1.0, 1.0});
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(near(t).x - classical(t).x) < 1e-8);
    CHECK(std::abs(near(t).y - classical(t).y) < 1e-8);
  }

  const DeformedBookSystem unit = deformed_book(1, 1, 0.5);
  const CanonicalState x0 = deformed_exact_solution(unit, {0.5, 1.0}, 0.0);
  const std::vector<double> one{1.0};
  const OdeTrajectory ref =
      rk45([&](double t, Vec2 y) { return deformed_rhs(unit, t, {y[0], y[1]}); }, 0.0,
           {x0.x, x0.y}, one);
  const CanonicalState s = deformed_exact_solution(unit, {0.5, 1.0}, 1.0);
  CHECK(std::abs(s.x - ref.states[0][0]) < 1e-6);
  CHECK(std::abs(s.y - ref.states[0][1]) < 1e-6);
}

TEST_CASE("Gamma matches its closed form") {
  // Gamma = Theta - ln((1 - k e^Theta)/(1 - k)), k = z c1.
  const double z = 0.5, c1 = 0.3, k = z * c1;
  DeformedBookSolution sol({{kSeasonal, cst(1.0), 0.0}, z}, {c1, 0.0});
  for (double t : {0.2, 0.6, 1.0, 1.4}) {
    const double theta = t + 0.5 * (1.0 - std::cos(t));
    const double gamma = theta - std::log((1.0 - k * std::exp(theta)) / (1.0 - k));
    CHECK(std::abs(sol.theta(t) - theta) < 1e-10);
    CHECK(std::abs(sol.gamma(t) - gamma) < 1e-9);
  }
}

TEST_CASE("fit constants invert the solution at a") {
  const DeformedBookSystem sys = deformed_book(1, 1, 0.7);
  const IntegrationConstants c = deformed_fit_constants(sys, 0.0, {0.9, -0.2});
  CHECK(c.c1 == doctest::Approx((1.0 - std::exp(-0.7 * 0.9)) / 0.7));
  const CanonicalState back = deformed_exact_solution(sys, c, 0.0);
  CHECK(back.x == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(back.y == -0.2);
}

TEST_CASE("validity window") {
  CHECK_FALSE(validity_window(deformed_book(1, 0, -1), 0.5, 10.0).bounded());
  CHECK_FALSE(validity_window(deformed_book(1, 0, 1), -0.5, 10.0).bounded());
  CHECK_FALSE(validity_window(deformed_book(1, 0, 0), 0.5, 10.0).bounded());
  const ValidityWindow w = validity_window(deformed_book(1, 0, 1), 0.5, 5.0);
  CHECK(std::abs(w.t_max - std::numbers::ln2) < 1e-9);
  CHECK(w.contains(0.69));
  CHECK_FALSE(w.contains(0.7));
  CHECK(validity_window(deformed_book(1, 0, 1), 2.0, 5.0).t_max == 0.0);
  CHECK_FALSE(validity_window(deformed_book(1, 0, 1), 0.5, 0.5).bounded());

  // Seasonal rate against a dense sign scan with step 1e-4.
  const DeformedBookSystem seasonal{{CoefficientFunction::parse("0.2 + sin(t)"), cst(0), 0.0}, 2};
  const double c1 = 0.2;
  const ValidityWindow ws = validity_window(seasonal, c1, 6.0);
  REQUIRE(ws.bounded());
  double scan = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 60000; ++i) {
    const double t = i * 1e-4;
    const double theta = 0.2 * t + 1.0 - std::cos(t);
    if (1.0 - 2.0 * c1 * std::exp(theta) <= 0.0) {
      scan = t;
      break;
    }
  }
  CHECK(ws.t_max <= scan);
  CHECK(ws.t_max > scan - 1e-4);
}

TEST_CASE("solution refuses to leave the window") {
  DeformedBookSolution sol(deformed_book(1, 0, 1), {0.5, 0.0});
  CHECK_NOTHROW(sol(0.69));
  CHECK_THROWS_AS(sol(0.7), ValidityWindowError);
}

TEST_CASE("deformed SIS hamiltonians") {
  const EpidemicState s{2.0 / 3.0, 3.0};
  const Vec2 h = deformed_sis_hamiltonians(1.0, s);
  CHECK(h[1] == doctest::Approx(-1.0));
  CHECK(h[0] == doctest::Approx((std::numbers::e - 1.0) * 2.0));
  const Vec2 lim = deformed_sis_hamiltonians(1e-13, {0.4, 1.7});
  CHECK(lim[0] == doctest::Approx(0.4 * 1.7).epsilon(1e-12));
  CHECK(lim[1] == doctest::Approx((1.0 - 0.4 * 0.4 * 1.7 * 1.7) / 1.7));
  for (double z : {0.1, 1.0, -2.0}) {
    CHECK(deformed_sis_hamiltonians(z, {0.4, 1.7})[1] == lim[1]);
  }
}

TEST_CASE("deformed SIS equations") {
  const DeformedSisSystem tiny{{kSeasonal, cst(1.0), 0.0}, 1e-13};
  for (const EpidemicState s : {EpidemicState{0.4, 1.7}, EpidemicState{2.0 / 3.0, 3.0}}) {
    const Vec2 d = deformed_sis_rhs(tiny, 0.8, s);
    const Vec2 c = sis_rhs(tiny.base, 0.8, s);
    CHECK(std::abs(d[0] - c[0]) < 1e-8);
    CHECK(std::abs(d[1] - c[1]) < 1e-8);
  }

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.1, 2.5);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 100) {
    const EpidemicState s{u(rng), u(rng)};
    const double D = s.q * s.q * s.p * s.p - 1.0;
    if (std::abs(D) < 0.05 || std::abs(D / s.p) > 5.0) continue;
    ++checked;
    const double z = checked % 2 ? 0.1 : 1.0;
    const double t = u(rng);
    const DeformedSisSystem sys{{kSeasonal, cst(0.6), 0.0}, z};
    const Vec2 got = deformed_sis_rhs(sys, t, s);

    // Displayed rational form.
    const Vec2 shown = displayed_deformed_sis(kSeasonal(t), 0.6, z, s.q, s.p);
    CHECK(std::abs(got[0] - shown[0]) <= 1e-9 * std::max(1.0, std::abs(shown[0])));
    CHECK(std::abs(got[1] - shown[1]) <= 1e-9 * std::max(1.0, std::abs(shown[1])));

    // Chain rule through the chart: d(q,p) = d from_canonical . deformed_rhs.
    const CanonicalState xy = to_canonical(s);
    const Vec2 v = deformed_rhs(sys.as_book(), t, xy);
    const EpidemicState ahead = from_canonical({xy.x + h * v[0], xy.y + h * v[1]});
    const EpidemicState behind = from_canonical({xy.x - h * v[0], xy.y - h * v[1]});
    const Vec2 pushed{(ahead.q - behind.q) / (2 * h), (ahead.p - behind.p) / (2 * h)};
    CHECK(std::abs(got[0] - pushed[0]) <= 1e-5 * std::max(1.0, std::abs(pushed[0])));
    CHECK(std::abs(got[1] - pushed[1]) <= 1e-5 * std::max(1.0, std::abs(pushed[1])));
  }
}

TEST_CASE("first-order SIS form") {
  const EpidemicState s{0.7, 2.1};
  auto defect = [&](double z) {
    const DeformedSisSystem sys{{kSeasonal, cst(1.0), 0.0}, z};
    const Vec2 full = deformed_sis_rhs(sys, 0.4, s);
    const Vec2 first = perturbed_rhs_first_order(sys, 0.4, s);
    return std::max(std::abs(full[0] - first[0]), std::abs(full[1] - first[1]));
  };
  CHECK(defect(1e-2) / defect(5e-3) == doctest::Approx(4.0).epsilon(0.1));

  const DeformedSisSystem unit{{cst(1.0), cst(1.0), 0.0}, 0.1};
  const Vec2 first = perturbed_rhs_first_order(unit, 0.0, EpidemicState{1.0, 0.5});
  const Vec2 classical = sis_rhs(unit.base, 0.0, {1.0, 0.5});
  CHECK(first[0] - classical[0] == doctest::Approx(0.05));
}

TEST_CASE("deformed SIS exact solution") {
  const double z = 0.1;
  const IntegrationConstants c{0.5, 2.0};
  const DeformedSisSystem sys{{kSeasonal, cst(1.0), 0.0}, z};
  DeformedSisSolution sol(sys, c);
  const EpidemicState at_a = sol(0.0);
  const EpidemicState expected = from_canonical({-std::log(1.0 - z * c.c1) / z, c.c2});
  CHECK(at_a.q == doctest::Approx(expected.q).epsilon(1e-12));
  CHECK(at_a.p == doctest::Approx(expected.p).epsilon(1e-12));

  const std::vector<double> times{0.5, 1.0};
  const OdeTrajectory ref =
      rk45([&](double t, Vec2 y) { return deformed_sis_rhs(sys, t, {y[0], y[1]}); }, 0.0,
           {at_a.q, at_a.p}, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const EpidemicState s = sol(times[i]);
    CHECK(std::abs(s.q - ref.states[i][0]) < 1e-6);
    CHECK(std::abs(s.p - ref.states[i][1]) < 1e-6);
  }

  const DeformedSisSystem tiny{{kSeasonal, cst(1.0), 0.0}, 1e-13};
  DeformedSisSolution near(tiny, {1.0, 2.0});
  SisSolution classical(tiny.base, {1.0, 2.0});
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(near(t).q - classical(t).q) < 1e-8);
    CHECK(std::abs(near(t).p - classical(t).p) < 1e-8);
  }
}

TEST_CASE("deformed structure relations") {
  CHECK(deformed_poisson_bracket_check(1.0, {std::numbers::ln2, 5.0}, 1e-5) < 1e-8);
  CHECK(deformed_poisson_bracket_check(1e-13, {0.6, -1.1}, 1e-5) < 1e-8);
  CHECK(check_deformed_bracket(41, 1000).passed);
  CHECK(check_deformed_commutator(42, 1000).passed);
}

TEST_CASE("deformed solution converges to the classical one linearly in z") {
  const BookSystem base{kSeasonal, cst(1.0), 0.0};
  BookSolution classical(base, {0.4, 1.0});
  auto distance = [&](double z) {
    DeformedBookSolution sol({base, z}, deformed_fit_constants({base, z}, 0.0, {0.4, 1.0}));
    double worst = 0.0;
    for (int i = 1; i <= 60; ++i) {
      const double t = 3.0 * i / 60.0;
      worst = std::max({worst, std::abs(sol(t).x - classical(t).x),
                        std::abs(sol(t).y - classical(t).y)});
    }
    return worst;
  };
  const double e1 = distance(1e-2), e2 = distance(5e-3), e3 = distance(2.5e-3);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.1));
}
