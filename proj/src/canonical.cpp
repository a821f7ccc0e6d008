#include "lhsis/canonical.hpp"

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

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double finite_sample(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite sample in finite difference", kNaN);
  return v;
}

void require_step(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
}

void check_hint(const CoefficientFunction& f, double a, const char* name) {
  const auto& hint = f.domain_hint();
  if (hint && !hint->contains(a)) {
    throw Error(std::string("base point a lies outside the domain hint of ") + name);
  }
}

}  // namespace

void validate(const BookSystem& sys) {
  check_hint(sys.bA, sys.a, "bA");
  check_hint(sys.bB, sys.a, "bB");
}

double hamiltonian_a(CanonicalState s) { return s.x * s.y; }
double hamiltonian_b(CanonicalState s) { return -s.x; }
Vec2 field_a(CanonicalState s) { return {s.x, -s.y}; }
Vec2 field_b(CanonicalState) { return {0.0, 1.0}; }

double hamiltonian(const BookSystem& sys, double t, CanonicalState s) {
  return sys.bA(t) * hamiltonian_a(s) + sys.bB(t) * hamiltonian_b(s);
}

Vec2 rhs(const BookSystem& sys, double t, CanonicalState s) {
  const double bA = sys.bA(t);
  return {bA * s.x, -bA * s.y + sys.bB(t)};
}

struct BookSolution::Caches {
  Caches(BookSystem s, IntegrationConstants k, double tol)
      : sys(std::move(s)),
        c(k),
        theta([this](double u) { return sys.bA(u); }, sys.a, 0.5 * tol),
        weighted([this](double u) { return std::exp(theta(u)) * sys.bB(u); }, sys.a,
                 0.5 * tol) {}

  BookSystem sys;
  IntegrationConstants c;
  CumulativeIntegral theta;
  CumulativeIntegral weighted;
};

BookSolution::BookSolution(BookSystem sys, IntegrationConstants c, double tol) {
  validate(sys);
  caches_ = std::make_unique<Caches>(std::move(sys), c, tol);
}

BookSolution::~BookSolution() = default;
BookSolution::BookSolution(BookSolution&&) noexcept = default;
BookSolution& BookSolution::operator=(BookSolution&&) noexcept = default;

double BookSolution::theta(double t) { return caches_->theta(t); }

double BookSolution::weighted(double t) { return caches_->c.c2 + caches_->weighted(t); }

CanonicalState BookSolution::operator()(double t) {
  const double th = theta(t);
  const double x = caches_->c.c1 * std::exp(th);
  const double y = weighted(t) * std::exp(-th);
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw DomainError("exact solution overflowed at t=" + detail::format_double(t), t);
  }
  return {x, y};
}

const BookSystem& BookSolution::system() const { return caches_->sys; }

IntegrationConstants BookSolution::constants() const { return caches_->c; }

CanonicalState exact_solution(const BookSystem& sys, IntegrationConstants c, double t,
                              double tol) {
  return BookSolution(sys, c, tol)(t);
}

IntegrationConstants fit_constants(const BookSystem& sys, double t0, CanonicalState s0) {
  if (t0 != sys.a) {
    throw Error("initial time must equal the base point a (got t0=" + detail::format_double(t0) +
                ", a=" + detail::format_double(sys.a) + ")");
  }
  return {s0.x, s0.y};
}

double default_step(CanonicalState s) {
  return 1e-5 * std::max({1.0, std::abs(s.x), std::abs(s.y)});
}

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, CanonicalState s,
                       double h) {
  require_step(h);
  auto dx = [&](const PhaseFunction& fn) {
    return (finite_sample(fn({s.x + h, s.y})) - finite_sample(fn({s.x - h, s.y}))) / (2.0 * h);
  };
  auto dy = [&](const PhaseFunction& fn) {
    return (finite_sample(fn({s.x, s.y + h})) - finite_sample(fn({s.x, s.y - h}))) / (2.0 * h);
  };
  return dx(f) * dy(g) - dy(f) * dx(g);
}

std::array<Vec2, 2> jacobian(const VectorField& field, CanonicalState s, double h) {
  require_step(h);
  const Vec2 xp = field({s.x + h, s.y});
  const Vec2 xm = field({s.x - h, s.y});
  const Vec2 yp = field({s.x, s.y + h});
  const Vec2 ym = field({s.x, s.y - h});
  std::array<Vec2, 2> J{};
  for (std::size_t i = 0; i < 2; ++i) {
    J[i][0] = (finite_sample(xp[i]) - finite_sample(xm[i])) / (2.0 * h);
    J[i][1] = (finite_sample(yp[i]) - finite_sample(ym[i])) / (2.0 * h);
  }
  return J;
}

Vec2 vf_commutator(const VectorField& A, const VectorField& B, CanonicalState s, double h) {
  const Vec2 a = A(s);
  const Vec2 b = B(s);
  const auto JA = jacobian(A, s, h);
  const auto JB = jacobian(B, s, h);
  Vec2 out{};
  for (std::size_t i = 0; i < 2; ++i) {
    out[i] = JB[i][0] * a[0] + JB[i][1] * a[1] - (JA[i][0] * b[0] + JA[i][1] * b[1]);
  }
  return out;
}

}  // namespace lhsis
