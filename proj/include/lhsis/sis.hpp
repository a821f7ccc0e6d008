#pragma once

// SIS epidemic layer.
//
// q = <rho> is the mean infected density and p = 1/sigma the inverse standard
// deviation. The canonical map to the book coordinates
//
//   x = (q^2 p^2 - 1)/p,      y = q p^2/(q^2 p^2 - 1)
//   q = x^2 y/(x^2 y^2 - 1),  p = (x^2 y^2 - 1)/x
//
// preserves dx ^ dy = dq ^ dp and turns b_A = rho0, b_B = b into
//
//   dq/dt = rho0(t) q - b(t)(q^2 + 1/p^2),   dp/dt = -rho0(t) p + 2 b(t) q p
//
// with Hamiltonian h_t = rho0(t) q p + b(t)(1 - q^2 p^2)/p.
//
// The moment system for <rho> and sigma^2 (constant rho0) is kept in cleared
// form. The noise term eta of rho = <rho> + eta enters only through
// <eta> = 0 and <eta^2> = sigma^2 and is not represented separately.

#include <memory>

#include "lhsis/canonical.hpp"

namespace lhsis {

struct EpidemicState {
  double q = 0.0;
  double p = 0.0;

  /// Density and sigma positive. Non-physical states are allowed.
  bool physical() const { return q > 0.0 && p > 0.0; }
};

struct SisSystem {
  CoefficientFunction rho0;
  CoefficientFunction b;
  double a = 0.0;

  BookSystem as_book() const { return {rho0, b, a}; }
};

struct MomentState {
  double mean = 0.0;
  double variance = 0.0;
};

/// |q^2 p^2 - 1| and |x^2 y^2 - 1| below this count as singular.
inline constexpr double kSingularThreshold = 1e-12;

/// Throws SingularLocusError for p == 0 or q^2 p^2 within kSingularThreshold of 1.
CanonicalState to_canonical(EpidemicState s);
/// Throws SingularLocusError for x == 0 or x^2 y^2 within kSingularThreshold of 1.
EpidemicState from_canonical(CanonicalState s);

Vec2 sis_rhs(const SisSystem& sys, double t, EpidemicState s);
double sis_hamiltonian(const SisSystem& sys, double t, EpidemicState s);

/// Constants of the book solution that passes through s0 at t0 == sys.a.
IntegrationConstants sis_fit_constants(const SisSystem& sys, double t0, EpidemicState s0);

/// Closed-form time-dependent SIS solution, with S(t) = c2 + int_a^t e^Theta b:
///
///   q(t) = S e^Theta / (S^2 - c1^-2),   p(t) = (c1 S^2 - 1/c1) e^-Theta
class SisSolution {
 public:
  SisSolution(SisSystem sys, IntegrationConstants c, double tol = kDefaultQuadratureTol);

  EpidemicState operator()(double t);

  BookSolution& book() { return book_; }

 private:
  BookSolution book_;
  double c1_;
};

EpidemicState sis_exact_solution(const SisSystem& sys, IntegrationConstants c, double t,
                                 double tol = kDefaultQuadratureTol);

/// Constant-rate closed form (rho0 constant, b == 1, a == 0); no quadrature.
EpidemicState sis_constant_solution(double rho0, IntegrationConstants c, double t);

/// (d<rho>/dt, d sigma^2/dt) = (<rho>(rho0 - <rho>) - sigma^2, 2 sigma^2 (rho0 - 2<rho>)).
/// Requires mean > 0 and variance >= 0.
Vec2 moment_rhs(double rho0, MomentState s);

/// (<rho>, sigma^2) = (q, 1/p^2).
MomentState moments_from_state(EpidemicState s);
/// Inverse of moments_from_state on the branch p > 0.
EpidemicState state_from_moments(MomentState m);

}  // namespace lhsis
