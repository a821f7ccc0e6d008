#pragma once

// The book-algebra Lie-Hamilton system in canonical coordinates (x, y) with
// symplectic form dx ^ dy:
//
//   h_A = x y,  h_B = -x,          {h_A, h_B} = -h_B
//   X_A = (x, -y),  X_B = (0, 1),  [X_A, X_B] = X_B
//
//   dx/dt = b_A(t) x,  dy/dt = -b_A(t) y + b_B(t)
//
// solved by quadratures with Theta(t) = int_a^t b_A:
//
//   x(t) = c1 e^Theta(t)
//   y(t) = (c2 + int_a^t e^Theta(u) b_B(u) du) e^-Theta(t)

#include <array>
#include <functional>
#include <memory>

#include "lhsis/quadrature.hpp"
#include "lhsis/timefn.hpp"

namespace lhsis {

using Vec2 = std::array<double, 2>;

struct CanonicalState {
  double x = 0.0;
  double y = 0.0;
};

struct BookSystem {
  CoefficientFunction bA;
  CoefficientFunction bB;
  double a = 0.0;  ///< quadrature base point, pinned to the initial time
};

struct IntegrationConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Throws Error when `a` lies outside a coefficient's domain hint.
void validate(const BookSystem& sys);

double hamiltonian_a(CanonicalState s);
double hamiltonian_b(CanonicalState s);
Vec2 field_a(CanonicalState s);
Vec2 field_b(CanonicalState s);

/// h_t = b_A(t) x y - b_B(t) x
double hamiltonian(const BookSystem& sys, double t, CanonicalState s);

/// (dx/dt, dy/dt)
Vec2 rhs(const BookSystem& sys, double t, CanonicalState s);

/// Closed-form solution evaluated on demand. Keeps the Theta and weighted
/// integrals cached, so a sweep over a time grid costs one quadrature pass.
/// Movable, not copyable; not for concurrent use.
class BookSolution {
 public:
  BookSolution(BookSystem sys, IntegrationConstants c, double tol = kDefaultQuadratureTol);
  ~BookSolution();
  BookSolution(BookSolution&&) noexcept;
  BookSolution& operator=(BookSolution&&) noexcept;

  CanonicalState operator()(double t);
  double theta(double t);
  /// c2 + int_a^t e^Theta(u) b_B(u) du
  double weighted(double t);

  const BookSystem& system() const;
  IntegrationConstants constants() const;

 private:
  struct Caches;
  std::unique_ptr<Caches> caches_;
};

CanonicalState exact_solution(const BookSystem& sys, IntegrationConstants c, double t,
                              double tol = kDefaultQuadratureTol);

/// (c1, c2) = (x0, y0). Requires t0 == sys.a.
IntegrationConstants fit_constants(const BookSystem& sys, double t0, CanonicalState s0);

using PhaseFunction = std::function<double(CanonicalState)>;
using VectorField = std::function<Vec2(CanonicalState)>;

/// Finite-difference step used when none is given: 1e-5 max(1, |x|, |y|).
double default_step(CanonicalState s);

/// {f, g} = f_x g_y - f_y g_x by central differences of step h.
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, CanonicalState s,
                       double h);

/// Central-difference Jacobian of a vector field; rows are components.
std::array<Vec2, 2> jacobian(const VectorField& field, CanonicalState s, double h);

/// Lie bracket [A, B](s) = J_B(s) A(s) - J_A(s) B(s).
Vec2 vf_commutator(const VectorField& A, const VectorField& B, CanonicalState s, double h);

}  // namespace lhsis
