#include "lhsis/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "format.hpp"
#include "lhsis/errors.hpp"

namespace lhsis {

namespace {

// 15-point Kronrod abscissae on [-1, 1] (non-negative half, descending) with
// the embedded 7-point Gauss rule on the odd entries.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool at_floor;

  bool operator<(const Panel& other) const { return error < other.error; }
};

using detail::format_double;

double sample(const RealFunction& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw QuadratureError("non-finite integrand sample at s=" + format_double(x), x, x);
  }
  return v;
}

Panel kronrod15(const RealFunction& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = sample(f, center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double magnitude = std::abs(kronrod);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = sample(f, center - dx);
    const double f2 = sample(f, center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    magnitude += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double error = std::abs((kronrod - gauss) * half);
  const double floor = 50.0 * kEps * magnitude * std::abs(half);
  return Panel{lo, hi, value, error, error <= floor};
}

}  // namespace

QuadratureResult integrate_detailed(const RealFunction& f, double lo, double hi, double tol,
                                    std::size_t max_panels) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("quadrature bounds must be finite");
  }
  if (lo == hi) return {};
  if (hi < lo) {
    QuadratureResult r = integrate_detailed(f, hi, lo, tol, max_panels);
    r.value = -r.value;
    return r;
  }

  std::priority_queue<Panel> open;
  double frozen_value = 0.0;
  double frozen_error = 0.0;
  std::size_t frozen = 0;
  std::size_t evaluations = 0;

  auto add = [&](const Panel& panel) {
    evaluations += 15;
    if (panel.at_floor) {
      frozen_value += panel.value;
      frozen_error += panel.error;
      ++frozen;
    } else {
      open.push(panel);
    }
  };

  add(kronrod15(f, lo, hi));
  double open_error = open.empty() ? 0.0 : open.top().error;

  while (!open.empty() && open_error + frozen_error > tol) {
    if (open.size() + frozen >= max_panels) {
      const Panel& worst = open.top();
      throw QuadratureError("quadrature did not converge within " + std::to_string(max_panels) +
                                " panels; worst panel [" + format_double(worst.lo) + ", " + format_double(worst.hi) +
                                "] error " + format_double(worst.error),
                            worst.lo, worst.hi);
    }
    const Panel worst = open.top();
    open.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      throw QuadratureError("panel [" + format_double(worst.lo) + ", " + format_double(worst.hi) +
                                "] cannot be subdivided further; error " + format_double(worst.error),
                            worst.lo, worst.hi);
    }
    open_error -= worst.error;
    const Panel left = kronrod15(f, worst.lo, mid);
    const Panel right = kronrod15(f, mid, worst.hi);
    add(left);
    add(right);
    if (!left.at_floor) open_error += left.error;
    if (!right.at_floor) open_error += right.error;
    if (open_error < 0.0) open_error = 0.0;
  }

  QuadratureResult result;
  result.value = frozen_value;
  result.error_estimate = frozen_error;
  result.panels = open.size() + frozen;
  result.evaluations = evaluations;
  // Sum the smallest contributions first.
  std::vector<Panel> rest;
  rest.reserve(open.size());
  while (!open.empty()) {
    rest.push_back(open.top());
    open.pop();
  }
  for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
    result.value += it->value;
    result.error_estimate += it->error;
  }
  return result;
}

double integrate(const RealFunction& f, double lo, double hi, double tol,
                 std::size_t max_panels) {
  return integrate_detailed(f, lo, hi, tol, max_panels).value;
}

CumulativeIntegral::CumulativeIntegral(RealFunction f, double a, double tol)
    : f_(std::move(f)), a_(a), tol_(tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (!std::isfinite(a)) throw std::invalid_argument("base point must be finite");
  cache_.emplace(a_, 0.0);
}

double CumulativeIntegral::operator()(double t) {
  auto above = cache_.lower_bound(t);
  if (above != cache_.end() && above->first == t) return above->second;
  auto nearest = above;
  if (above == cache_.end()) {
    nearest = std::prev(above);
  } else if (above != cache_.begin()) {
    auto below = std::prev(above);
    if (t - below->first <= above->first - t) nearest = below;
  }
  const auto [from, base] = *nearest;
  const double value = base + integrate(f_, from, t, tol_);
  cache_.emplace(t, value);
  return value;
}

CumulativeIntegral cumulative(RealFunction f, double a, double tol) {
  return CumulativeIntegral(std::move(f), a, tol);
}

}  // namespace lhsis
