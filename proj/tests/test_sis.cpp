#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lhsis/errors.hpp"
#include "lhsis/invariants.hpp"
#include "lhsis/oracle.hpp"
#include "lhsis/sis.hpp"

using namespace lhsis;

namespace {

SisSystem constant_sis(double rho0, double b = 1.0, double a = 0.0) {
  return {CoefficientFunction::constant(rho0), CoefficientFunction::constant(b), a};
}

const SisSystem kSeasonal{CoefficientFunction::parse("1 + 0.5*sin(t)"),
                          CoefficientFunction::constant(1.0), 0.0};

OdeTrajectory rk45(const SisSystem& sys, EpidemicState s0, const std::vector<double>& times) {
  const OdeRhs f = [&sys](double u, const StateVector& y) {
    const Vec2 d = sis_rhs(sys, u, {y[0], y[1]});
    return StateVector{d[0], d[1]};
  };
  return integrate_ode({f, sys.a, {s0.q, s0.p}, times.back()}, {}, times);
}

// Constant-rate closed form written out independently of the library.
EpidemicState constant_rate_reference(double rho0, double c1, double c2, double t) {
  const double W = std::exp(rho0 * t) + c2 * rho0 - 1.0;
  return {rho0 * W * std::exp(rho0 * t) / (W * W - rho0 * rho0 / (c1 * c1)),
          (c1 * W * W / (rho0 * rho0) - 1.0 / c1) * std::exp(-rho0 * t)};
}

}  // namespace

TEST_CASE("chart maps") {
  const CanonicalState xy = to_canonical({2.0 / 3.0, 3.0});
  CHECK(xy.x == doctest::Approx(1.0));
  CHECK(xy.y == doctest::Approx(2.0));
  const CanonicalState origin = to_canonical({0.0, 1.0});
  CHECK(origin.x == -1.0);
  CHECK(origin.y == 0.0);
  CHECK_THROWS_AS(to_canonical({1.0, 1.0}), SingularLocusError);
  CHECK_THROWS_AS(to_canonical({1.0, 0.0}), SingularLocusError);

  const EpidemicState qp = from_canonical({1.0, 2.0});
  CHECK(qp.q == doctest::Approx(2.0 / 3.0));
  CHECK(qp.p == doctest::Approx(3.0));
  const EpidemicState back = from_canonical({-1.0, 0.0});
  CHECK(back.q == 0.0);
  CHECK(back.p == 1.0);
  CHECK_THROWS_AS(from_canonical({1.0, 1.0}), SingularLocusError);
  CHECK_THROWS_AS(from_canonical({0.0, 1.0}), SingularLocusError);
}

TEST_CASE("chart round trip and canonicity") {
  CHECK(check_chart_round_trip(21, 1000).passed);
  const InvariantResult det = check_canonicity(22, 1000);
  CAPTURE(det.worst);
  CHECK(det.passed);
}

TEST_CASE("sis right-hand side") {
  const Vec2 d = sis_rhs(constant_sis(1.0), 0.0, {1.0, 1.0});
  CHECK(d[0] == -1.0);
  CHECK(d[1] == 1.0);
  const SisSystem dilation{CoefficientFunction::parse("2 + t"), CoefficientFunction::constant(0.0),
                           0.0};
  const Vec2 dil = sis_rhs(dilation, 1.0, {0.5, 4.0});
  CHECK(dil[0] == 1.5);
  CHECK(dil[1] == -12.0);
  // Large p: dq/dt -> q (rho0 - q), vanishing at the equilibrium density.
  CHECK(std::abs(sis_rhs(constant_sis(1.3), 0.0, {1.3, 1e6})[0]) < 1e-11);
}

TEST_CASE("sis hamiltonian") {
  CHECK(sis_hamiltonian(constant_sis(2.0), 0.0, {1.0, 1.0}) == 2.0);
  CHECK(sis_hamiltonian(constant_sis(0.7), 0.0, {0.0, 1.0}) == 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 2.5);
  for (int i = 0; i < 100; ++i) {
    const EpidemicState s{u(rng), u(rng)};
    if (std::abs(s.q * s.q * s.p * s.p - 1.0) < 1e-3) continue;
    const double t = u(rng);
    const BookSystem book = kSeasonal.as_book();
    CHECK(sis_hamiltonian(kSeasonal, t, s) ==
          doctest::Approx(hamiltonian(book, t, to_canonical(s))).epsilon(1e-12));
  }
}

TEST_CASE("time-dependent exact solution") {
  SisSolution sol(kSeasonal, {1.0, 2.0});
  const EpidemicState at_a = sol(0.0);
  CHECK(at_a.q == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(at_a.p == doctest::Approx(3.0).epsilon(1e-14));

  const std::vector<double> times{0.5, 1.0, 2.0};
  const OdeTrajectory ref = rk45(kSeasonal, {2.0 / 3.0, 3.0}, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const EpidemicState s = sol(times[i]);
    CHECK(std::abs(s.q - ref.states[i][0]) < 1e-6);
    CHECK(std::abs(s.p - ref.states[i][1]) < 1e-6);
  }

  const EpidemicState unit = sis_exact_solution(constant_sis(1.0), {1.0, 2.0}, 1.0);
  const EpidemicState closed = constant_rate_reference(1.0, 1.0, 2.0, 1.0);
  CHECK(std::abs(unit.q - closed.q) < 1e-9);
  CHECK(std::abs(unit.p - closed.p) < 1e-9);
}

TEST_CASE("constant-rate closed form") {
  const EpidemicState s0 = sis_constant_solution(1.0, {1.0, 2.0}, 0.0);
  CHECK(s0.q == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s0.p == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::abs(sis_constant_solution(1.0, {1.0, 2.0}, 30.0).q - 1.0) < 1e-3);
  for (double rho0 : {0.5, 1.0, 2.0}) {
    for (double t : {0.3, 1.0, 4.0}) {
      const EpidemicState s = sis_constant_solution(rho0, {0.9, 1.7}, t);
      const EpidemicState ref = constant_rate_reference(rho0, 0.9, 1.7, t);
      CHECK(s.q == doctest::Approx(ref.q).epsilon(1e-13));
      CHECK(s.p == doctest::Approx(ref.p).epsilon(1e-13));
    }
  }
  const std::vector<double> one{1.0};
  const OdeTrajectory ref = rk45(constant_sis(1.0), {2.0 / 3.0, 3.0}, one);
  const EpidemicState s = sis_constant_solution(1.0, {1.0, 2.0}, 1.0);
  CHECK(std::abs(s.q - ref.states[0][0]) < 1e-6);
  CHECK(std::abs(s.p - ref.states[0][1]) < 1e-6);
  CHECK_THROWS_AS(sis_constant_solution(0.0, {1.0, 2.0}, 1.0), Error);
}

TEST_CASE("moment equations") {
  const Vec2 logistic = moment_rhs(1.5, {0.4, 0.0});
  CHECK(logistic[0] == doctest::Approx(0.4 * (1.5 - 0.4)));
  CHECK(logistic[1] == 0.0);
  CHECK(moment_rhs(2.0, {1.0, 0.3})[1] == 0.0);
  const Vec2 d = moment_rhs(1.0, {1.0, 0.25});
  CHECK(d[0] == -0.25);
  CHECK(d[1] == -0.5);
  CHECK_THROWS_AS(moment_rhs(1.0, {0.0, 0.1}), DomainError);
  CHECK_THROWS_AS(moment_rhs(1.0, {0.5, -0.1}), DomainError);

  const MomentState m = moments_from_state({0.5, 2.0});
  CHECK(m.mean == 0.5);
  CHECK(m.variance == 0.25);
  const MomentState unit = moments_from_state({1.0, 1.0});
  CHECK(unit.mean == 1.0);
  CHECK(unit.variance == 1.0);
  const EpidemicState inv = state_from_moments({0.5, 0.25});
  CHECK(inv.q == 0.5);
  CHECK(inv.p == 2.0);
}

TEST_CASE("moment equations are the pushforward of the SIS system") {
  // Independent finite-difference chain rule.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 2.5);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const double rho0 = u(rng);
    const EpidemicState s{u(rng), u(rng)};
    const Vec2 d = sis_rhs(constant_sis(rho0), 0.0, s);
    const MomentState ahead = moments_from_state({s.q + h * d[0], s.p + h * d[1]});
    const MomentState behind = moments_from_state({s.q - h * d[0], s.p - h * d[1]});
    const Vec2 m = moment_rhs(rho0, moments_from_state(s));
    CHECK(std::abs((ahead.mean - behind.mean) / (2 * h) - m[0]) <= 1e-5 * std::max(1.0, std::abs(m[0])));
    CHECK(std::abs((ahead.variance - behind.variance) / (2 * h) - m[1]) <=
          1e-5 * std::max(1.0, std::abs(m[1])));
  }
  CHECK(check_moment_pushforward(23, 100).passed);
}
