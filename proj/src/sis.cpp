#include "lhsis/sis.hpp"

#include <cmath>
#include <string>

#include "format.hpp"
#include "lhsis/errors.hpp"

namespace lhsis {

namespace {

using detail::format_double;

std::string pair_text(double a, double b) {
  return "(" + format_double(a) + ", " + format_double(b) + ")";
}

void require_nonzero_p(EpidemicState s) {
  if (s.p == 0.0) throw SingularLocusError("p = 0 at (q,p)=" + pair_text(s.q, s.p), s.q, s.p);
}

}  // namespace

CanonicalState to_canonical(EpidemicState s) {
  require_nonzero_p(s);
  const double d = s.q * s.q * s.p * s.p - 1.0;
  if (std::abs(d) < kSingularThreshold) {
    throw SingularLocusError("q^2 p^2 = 1 at (q,p)=" + pair_text(s.q, s.p), s.q, s.p);
  }
  return {d / s.p, s.q * s.p * s.p / d};
}

EpidemicState from_canonical(CanonicalState s) {
  if (s.x == 0.0) throw SingularLocusError("x = 0 at (x,y)=" + pair_text(s.x, s.y), s.x, s.y);
  const double d = s.x * s.x * s.y * s.y - 1.0;
  if (std::abs(d) < kSingularThreshold) {
    throw SingularLocusError("x^2 y^2 = 1 at (x,y)=" + pair_text(s.x, s.y), s.x, s.y);
  }
  return {s.x * s.x * s.y / d, d / s.x};
}

Vec2 sis_rhs(const SisSystem& sys, double t, EpidemicState s) {
  require_nonzero_p(s);
  const double rho0 = sys.rho0(t);
  const double b = sys.b(t);
  return {rho0 * s.q - b * (s.q * s.q + 1.0 / (s.p * s.p)), -rho0 * s.p + 2.0 * b * s.q * s.p};
}

double sis_hamiltonian(const SisSystem& sys, double t, EpidemicState s) {
  require_nonzero_p(s);
  return sys.rho0(t) * s.q * s.p + sys.b(t) * (1.0 - s.q * s.q * s.p * s.p) / s.p;
}

IntegrationConstants sis_fit_constants(const SisSystem& sys, double t0, EpidemicState s0) {
  return fit_constants(sys.as_book(), t0, to_canonical(s0));
}

SisSolution::SisSolution(SisSystem sys, IntegrationConstants c, double tol)
    : book_(sys.as_book(), c, tol), c1_(c.c1) {
  if (c.c1 == 0.0) throw Error("the SIS exact solution requires c1 != 0");
}

EpidemicState SisSolution::operator()(double t) {
  const double theta = book_.theta(t);
  const double S = book_.weighted(t);
  const double singular = c1_ * c1_ * S * S - 1.0;
  if (std::abs(singular) < kSingularThreshold) {
    throw SingularLocusError("SIS solution crosses q^2 p^2 = 1 at t=" + format_double(t),
                             c1_ * std::exp(theta), S * std::exp(-theta));
  }
  const EpidemicState out{S * std::exp(theta) / (S * S - 1.0 / (c1_ * c1_)),
                          (c1_ * S * S - 1.0 / c1_) * std::exp(-theta)};
  if (!std::isfinite(out.q) || !std::isfinite(out.p)) {
    throw DomainError("SIS solution overflowed at t=" + format_double(t), t);
  }
  return out;
}

EpidemicState sis_exact_solution(const SisSystem& sys, IntegrationConstants c, double t,
                                 double tol) {
  return SisSolution(sys, c, tol)(t);
}

EpidemicState sis_constant_solution(double rho0, IntegrationConstants c, double t) {
  if (rho0 == 0.0) throw Error("the constant-rate SIS solution requires rho0 != 0");
  if (c.c1 == 0.0) throw Error("the constant-rate SIS solution requires c1 != 0");
  const double growth = std::exp(rho0 * t);
  const double w = growth + c.c2 * rho0 - 1.0;
  const double singular = c.c1 * c.c1 * w * w / (rho0 * rho0) - 1.0;
  if (std::abs(singular) < kSingularThreshold) {
    throw SingularLocusError("constant-rate SIS solution crosses q^2 p^2 = 1 at t=" +
                                 format_double(t),
                             c.c1 * growth, w / (rho0 * growth));
  }
  const double q = rho0 * w * growth / (w * w - rho0 * rho0 / (c.c1 * c.c1));
  const double p = (c.c1 * w * w / (rho0 * rho0) - 1.0 / c.c1) / growth;
  if (!std::isfinite(q) || !std::isfinite(p)) {
    throw DomainError("constant-rate SIS solution overflowed at t=" + format_double(t), t);
  }
  return {q, p};
}

Vec2 moment_rhs(double rho0, MomentState s) {
  if (!(s.mean > 0.0)) throw DomainError("moment system requires <rho> > 0", NAN);
  if (!(s.variance >= 0.0)) throw DomainError("moment system requires sigma^2 >= 0", NAN);
  return {s.mean * (rho0 - s.mean) - s.variance, 2.0 * s.variance * (rho0 - 2.0 * s.mean)};
}

MomentState moments_from_state(EpidemicState s) {
  require_nonzero_p(s);
  return {s.q, 1.0 / (s.p * s.p)};
}

EpidemicState state_from_moments(MomentState m) {
  if (!(m.variance > 0.0)) throw DomainError("sigma^2 must be positive to recover p", NAN);
  return {m.mean, 1.0 / std::sqrt(m.variance)};
}

}  // namespace lhsis
