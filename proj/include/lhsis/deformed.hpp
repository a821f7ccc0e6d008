#pragma once

// Quantum-deformed book systems (deformation parameter z; z -> 0 recovers
// the classical system).
//
//   h_zA = ((e^{zx} - 1)/z) y,  h_zB = -x,   {h_zA, h_zB} = (e^{-z h_zB} - 1)/z
//   X_zA = ((e^{zx} - 1)/z, -e^{zx} y),  X_zB = (0, 1),  [X_zA, X_zB] = e^{zx} X_zB
//
//   dx/dt = b_A(t) (e^{zx} - 1)/z,   dy/dt = -b_A(t) e^{zx} y + b_B(t)
//
// Exact solution, with Theta(t) = int_a^t b_A and
// Gamma(t) = int_a^t b_A / (1 - z c1 e^Theta):
//
//   x(t) = -ln(1 - z c1 e^Theta(t)) / z
//   y(t) = e^-Gamma(t) (c2 + int_a^t e^Gamma(u) b_B(u) du)
//
// valid while 1 - z c1 e^Theta(t) > 0. The SIS versions follow through the
// canonical map of sis.hpp with b_A = rho0, b_B = b.

#include <limits>
#include <memory>

#include "lhsis/canonical.hpp"
#include "lhsis/sis.hpp"

namespace lhsis {

struct DeformedBookSystem {
  BookSystem base;
  double z = 0.0;
};

struct DeformedSisSystem {
  SisSystem base;
  double z = 0.0;

  DeformedBookSystem as_book() const { return {base.as_book(), z}; }
};

/// Times [a, t_max) on which 1 - z c1 e^Theta(t) stays positive.
struct ValidityWindow {
  double t_max = std::numeric_limits<double>::infinity();

  bool bounded() const { return t_max != std::numeric_limits<double>::infinity(); }
  bool contains(double t) const { return t < t_max; }
};

/// (e^{zx} - 1)/z, switching to the series x (1 + zx/2) for |zx| < 1e-8.
double expm1_ratio(double z, double x);
/// -ln(1 - z u)/z, switching to the series u (1 + zu/2) for |zu| < 1e-8.
double log1p_ratio(double z, double u);

double deformed_hamiltonian_a(double z, CanonicalState s);
double deformed_hamiltonian_b(double z, CanonicalState s);
Vec2 deformed_field_a(double z, CanonicalState s);
Vec2 deformed_field_b(double z, CanonicalState s);

/// Throws DomainError if e^{zx} overflows.
double deformed_hamiltonian(const DeformedBookSystem& sys, double t, CanonicalState s);
Vec2 deformed_rhs(const DeformedBookSystem& sys, double t, CanonicalState s);

/// c1 = (1 - e^{-z x0})/z, c2 = y0. Requires t0 == a.
IntegrationConstants deformed_fit_constants(const DeformedBookSystem& sys, double t0,
                                            CanonicalState s0);

/// First root of 1 - z c1 e^Theta(t) on [a, horizon]: a 4096-cell sign scan
/// followed by bisection to 1e-10. Unbounded when z c1 <= 0 or no root is
/// bracketed before the horizon.
ValidityWindow validity_window(const DeformedBookSystem& sys, double c1, double horizon,
                               double tol = kDefaultQuadratureTol);

/// Closed-form deformed solution with cached Theta, Gamma and weighted
/// integrals. Tolerance is split 50/25/25 across the three levels.
class DeformedBookSolution {
 public:
  DeformedBookSolution(DeformedBookSystem sys, IntegrationConstants c,
                       double tol = kDefaultQuadratureTol);
  ~DeformedBookSolution();
  DeformedBookSolution(DeformedBookSolution&&) noexcept;
  DeformedBookSolution& operator=(DeformedBookSolution&&) noexcept;

  /// Throws ValidityWindowError when 1 - z c1 e^Theta(t) <= 0.
  CanonicalState operator()(double t);

  double theta(double t);
  double gamma(double t);
  /// c2 + int_a^t e^Gamma(u) b_B(u) du
  double weighted(double t);
  /// ln(1 - z c1 e^Theta(t)) / z, i.e. -x(t).
  double log_ratio(double t);

  const DeformedBookSystem& system() const;
  IntegrationConstants constants() const;

 private:
  struct Caches;
  std::unique_ptr<Caches> caches_;
};

CanonicalState deformed_exact_solution(const DeformedBookSystem& sys, IntegrationConstants c,
                                       double t, double tol = kDefaultQuadratureTol);

/// (h_zA, h_zB) in SIS variables.
Vec2 deformed_sis_hamiltonians(double z, EpidemicState s);

/// Deformed SIS equations, rearranged so that z only divides inside
/// expm1_ratio; algebraically identical to the displayed rational form.
Vec2 deformed_sis_rhs(const DeformedSisSystem& sys, double t, EpidemicState s);

IntegrationConstants deformed_sis_fit_constants(const DeformedSisSystem& sys, double t0,
                                                EpidemicState s0);

/// Deformed SIS solution, with ell = ln(1 - z c1 e^Theta)/z and
/// S = c2 + int_a^t e^Gamma b:
///
///   q = e^-Gamma S / (e^-2Gamma S^2 - ell^-2),   p = 1/ell - ell e^-2Gamma S^2
class DeformedSisSolution {
 public:
  DeformedSisSolution(DeformedSisSystem sys, IntegrationConstants c,
                      double tol = kDefaultQuadratureTol);

  EpidemicState operator()(double t);

  DeformedBookSolution& book() { return book_; }

 private:
  DeformedBookSolution book_;
};

EpidemicState deformed_sis_exact_solution(const DeformedSisSystem& sys, IntegrationConstants c,
                                          double t, double tol = kDefaultQuadratureTol);

/// Right-hand sides truncated after the first order in z.
Vec2 perturbed_rhs_first_order(const DeformedBookSystem& sys, double t, CanonicalState s);
Vec2 perturbed_rhs_first_order(const DeformedSisSystem& sys, double t, EpidemicState s);

/// |{h_zA, h_zB} - (e^{-z h_zB} - 1)/z| with central differences of step h.
double deformed_poisson_bracket_check(double z, CanonicalState s, double h);
/// Max-norm of [X_zA, X_zB] - e^{zx} X_zB with central differences of step h.
double deformed_commutator_defect(double z, CanonicalState s, double h);

}  // namespace lhsis
