#include "lhsis/deformed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "format.hpp"
#include "lhsis/errors.hpp"

namespace lhsis {

namespace {

using detail::format_double;

constexpr double kSeriesSwitch = 1e-8;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kWindowScanCells = 4096;
constexpr double kWindowBisectionWidth = 1e-10;

double checked_exp(double v, double t) {
  const double e = std::exp(v);
  if (!std::isfinite(e)) throw DomainError("e^{zx} overflowed (zx=" + format_double(v) + ")", t);
  return e;
}

[[noreturn]] void throw_window_exit(double t, double argument) {
  throw ValidityWindowError("deformed solution left its validity window at t=" +
                                format_double(t) + " (1 - z c1 e^Theta = " +
                                format_double(argument) + ")",
                            t, kNaN);
}

}  // namespace

double expm1_ratio(double z, double x) {
  const double zx = z * x;
  if (std::abs(zx) < kSeriesSwitch) return x * (1.0 + 0.5 * zx);
  return std::expm1(zx) / z;
}

double log1p_ratio(double z, double u) {
  const double zu = z * u;
  if (std::abs(zu) < kSeriesSwitch) return u * (1.0 + 0.5 * zu);
  return -std::log1p(-zu) / z;
}

double deformed_hamiltonian_a(double z, CanonicalState s) { return expm1_ratio(z, s.x) * s.y; }

double deformed_hamiltonian_b(double, CanonicalState s) { return -s.x; }

Vec2 deformed_field_a(double z, CanonicalState s) {
  return {expm1_ratio(z, s.x), -std::exp(z * s.x) * s.y};
}

Vec2 deformed_field_b(double, CanonicalState) { return {0.0, 1.0}; }

double deformed_hamiltonian(const DeformedBookSystem& sys, double t, CanonicalState s) {
  const double ratio = expm1_ratio(sys.z, s.x);
  if (!std::isfinite(ratio)) checked_exp(sys.z * s.x, t);
  return sys.base.bA(t) * ratio * s.y - sys.base.bB(t) * s.x;
}

Vec2 deformed_rhs(const DeformedBookSystem& sys, double t, CanonicalState s) {
  const double growth = checked_exp(sys.z * s.x, t);
  const double bA = sys.base.bA(t);
  return {bA * expm1_ratio(sys.z, s.x), -bA * growth * s.y + sys.base.bB(t)};
}

IntegrationConstants deformed_fit_constants(const DeformedBookSystem& sys, double t0,
                                            CanonicalState s0) {
  const IntegrationConstants classical = fit_constants(sys.base, t0, s0);
  return {expm1_ratio(-sys.z, classical.c1), classical.c2};
}

ValidityWindow validity_window(const DeformedBookSystem& sys, double c1, double horizon,
                               double tol) {
  const double a = sys.base.a;
  if (!(horizon > a)) throw std::invalid_argument("validity window horizon must exceed a");
  const double k = sys.z * c1;
  if (!(k > 0.0)) return {};
  // 1 - k e^Theta <= 0  <=>  Theta >= -ln k
  const double threshold = -std::log(k);
  if (threshold <= 0.0) return {a};
  const CoefficientFunction bA = sys.base.bA;
  CumulativeIntegral theta([&bA](double u) { return bA(u); }, a, tol);
  auto outside = [&](double t) { return theta(t) >= threshold; };

  const double cell = (horizon - a) / kWindowScanCells;
  double lo = a;
  for (int i = 1; i <= kWindowScanCells; ++i) {
    const double hi = i == kWindowScanCells ? horizon : a + i * cell;
    if (outside(hi)) {
      double right = hi;
      while (right - lo > kWindowBisectionWidth) {
        const double mid = 0.5 * (lo + right);
        if (mid <= lo || mid >= right) break;
        (outside(mid) ? right : lo) = mid;
      }
      return {lo};
    }
    lo = hi;
  }
  return {};
}

struct DeformedBookSolution::Caches {
  Caches(DeformedBookSystem s, IntegrationConstants k, double tol)
      : sys(std::move(s)),
        c(k),
        theta([this](double u) { return sys.base.bA(u); }, sys.base.a, 0.5 * tol),
        gamma(
            [this](double v) {
              const double argument = 1.0 - sys.z * c.c1 * std::exp(theta(v));
              if (!(argument > 0.0)) throw_window_exit(v, argument);
              return sys.base.bA(v) / argument;
            },
            sys.base.a, 0.25 * tol),
        weighted([this](double u) { return std::exp(gamma_at(u)) * sys.base.bB(u); },
                 sys.base.a, 0.25 * tol) {}

  // Gamma coincides with Theta in the undeformed case.
  double gamma_at(double t) { return sys.z == 0.0 ? theta(t) : gamma(t); }

  DeformedBookSystem sys;
  IntegrationConstants c;
  CumulativeIntegral theta;
  CumulativeIntegral gamma;
  CumulativeIntegral weighted;
};

DeformedBookSolution::DeformedBookSolution(DeformedBookSystem sys, IntegrationConstants c,
                                           double tol) {
  validate(sys.base);
  if (!std::isfinite(sys.z)) throw std::invalid_argument("deformation parameter must be finite");
  caches_ = std::make_unique<Caches>(std::move(sys), c, tol);
}

DeformedBookSolution::~DeformedBookSolution() = default;
DeformedBookSolution::DeformedBookSolution(DeformedBookSolution&&) noexcept = default;
DeformedBookSolution& DeformedBookSolution::operator=(DeformedBookSolution&&) noexcept = default;

double DeformedBookSolution::theta(double t) { return caches_->theta(t); }

double DeformedBookSolution::gamma(double t) { return caches_->gamma_at(t); }

double DeformedBookSolution::weighted(double t) { return caches_->c.c2 + caches_->weighted(t); }

double DeformedBookSolution::log_ratio(double t) {
  const double u = caches_->c.c1 * std::exp(theta(t));
  const double zu = caches_->sys.z * u;
  if (!(zu < 1.0)) throw_window_exit(t, 1.0 - zu);
  return -log1p_ratio(caches_->sys.z, u);
}

CanonicalState DeformedBookSolution::operator()(double t) {
  const double x = -log_ratio(t);
  const double y = weighted(t) * std::exp(-gamma(t));
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw DomainError("deformed solution overflowed at t=" + format_double(t), t);
  }
  return {x, y};
}

const DeformedBookSystem& DeformedBookSolution::system() const { return caches_->sys; }

IntegrationConstants DeformedBookSolution::constants() const { return caches_->c; }

CanonicalState deformed_exact_solution(const DeformedBookSystem& sys, IntegrationConstants c,
                                       double t, double tol) {
  return DeformedBookSolution(sys, c, tol)(t);
}

Vec2 deformed_sis_hamiltonians(double z, EpidemicState s) {
  if (s.p == 0.0) throw SingularLocusError("p = 0 in deformed SIS Hamiltonian", s.q, s.p);
  const double qp2 = s.q * s.q * s.p * s.p;
  const double d = qp2 - 1.0;
  if (std::abs(d) < kSingularThreshold) {
    throw SingularLocusError("q^2 p^2 = 1 in deformed SIS Hamiltonian", s.q, s.p);
  }
  const double x = d / s.p;
  const double ratio = expm1_ratio(z, x);
  if (!std::isfinite(ratio)) checked_exp(z * x, kNaN);
  return {s.q * s.p * s.p / d * ratio, (1.0 - qp2) / s.p};
}

Vec2 deformed_sis_rhs(const DeformedSisSystem& sys, double t, EpidemicState s) {
  if (s.p == 0.0) throw SingularLocusError("p = 0 in deformed SIS system", s.q, s.p);
  const double q = s.q;
  const double p = s.p;
  const double qp2 = q * q * p * p;
  const double d = qp2 - 1.0;
  if (std::abs(d) < kSingularThreshold) {
    throw SingularLocusError("q^2 p^2 = 1 in deformed SIS system", q, p);
  }
  const double x = d / p;
  const double growth = checked_exp(sys.z * x, t);
  const double ratio = expm1_ratio(sys.z, x);
  const double rho0 = sys.base.rho0(t);
  const double b = sys.base.b(t);
  const double d2 = d * d;
  const double dq = rho0 * q * (-2.0 * p * ratio + d * (qp2 + 1.0) * growth) / d2 -
                    b * (q * q + 1.0 / (p * p));
  const double dp = -rho0 * p * p * (-(1.0 + qp2) * ratio + 2.0 * q * q * p * d * growth) / d2 +
                    2.0 * b * q * p;
  return {dq, dp};
}

IntegrationConstants deformed_sis_fit_constants(const DeformedSisSystem& sys, double t0,
                                                EpidemicState s0) {
  return deformed_fit_constants(sys.as_book(), t0, to_canonical(s0));
}

DeformedSisSolution::DeformedSisSolution(DeformedSisSystem sys, IntegrationConstants c,
                                         double tol)
    : book_(sys.as_book(), c, tol) {
  if (c.c1 == 0.0) throw Error("the deformed SIS exact solution requires c1 != 0");
}

EpidemicState DeformedSisSolution::operator()(double t) {
  const double ell = book_.log_ratio(t);
  const double decay = std::exp(-book_.gamma(t));
  const double S = book_.weighted(t);
  const double y = decay * S;
  const double singular = ell * ell * y * y - 1.0;
  if (ell == 0.0 || std::abs(singular) < kSingularThreshold) {
    throw SingularLocusError("deformed SIS solution crosses q^2 p^2 = 1 at t=" + format_double(t),
                             -ell, y);
  }
  const EpidemicState out{decay * S / (decay * decay * S * S - 1.0 / (ell * ell)),
                          1.0 / ell - ell * decay * decay * S * S};
  if (!std::isfinite(out.q) || !std::isfinite(out.p)) {
    throw DomainError("deformed SIS solution overflowed at t=" + format_double(t), t);
  }
  return out;
}

EpidemicState deformed_sis_exact_solution(const DeformedSisSystem& sys, IntegrationConstants c,
                                          double t, double tol) {
  return DeformedSisSolution(sys, c, tol)(t);
}

Vec2 perturbed_rhs_first_order(const DeformedBookSystem& sys, double t, CanonicalState s) {
  const double bA = sys.base.bA(t);
  const double z = sys.z;
  return {bA * (s.x + 0.5 * z * s.x * s.x), -bA * (s.y + z * s.x * s.y) + sys.base.bB(t)};
}

Vec2 perturbed_rhs_first_order(const DeformedSisSystem& sys, double t, EpidemicState s) {
  if (s.p == 0.0) throw SingularLocusError("p = 0 in perturbed SIS system", s.q, s.p);
  const double rho0 = sys.base.rho0(t);
  const double b = sys.base.b(t);
  const double z = sys.z;
  const double q = s.q;
  const double p = s.p;
  return {rho0 * q - b * (q * q + 1.0 / (p * p)) + z * rho0 * q * q * q * p,
          2.0 * b * q * p - rho0 * p + 0.5 * z * rho0 * (1.0 - 3.0 * q * q * p * p)};
}

double deformed_poisson_bracket_check(double z, CanonicalState s, double h) {
  const double bracket = poisson_bracket([z](CanonicalState u) { return deformed_hamiltonian_a(z, u); },
                                         [z](CanonicalState u) { return deformed_hamiltonian_b(z, u); },
                                         s, h);
  return std::abs(bracket - expm1_ratio(z, -deformed_hamiltonian_b(z, s)));
}

double deformed_commutator_defect(double z, CanonicalState s, double h) {
  const Vec2 bracket = vf_commutator([z](CanonicalState u) { return deformed_field_a(z, u); },
                                     [z](CanonicalState u) { return deformed_field_b(z, u); }, s, h);
  const double growth = std::exp(z * s.x);
  const Vec2 expected = deformed_field_b(z, s);
  return std::max(std::abs(bracket[0] - growth * expected[0]),
                  std::abs(bracket[1] - growth * expected[1]));
}

}  // namespace lhsis
