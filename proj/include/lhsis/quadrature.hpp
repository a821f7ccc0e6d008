#pragma once

#include <cstddef>
#include <functional>
#include <map>

namespace lhsis {

using RealFunction = std::function<double(double)>;

/// Absolute tolerance of one top-level integral.
inline constexpr double kDefaultQuadratureTol = 1e-10;
inline constexpr std::size_t kDefaultPanelBudget = 1'000'000;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
};

/// Adaptive Gauss-Kronrod (G7/K15) quadrature of f over [lo, hi].
///
/// Panels are split worst-first until the summed |K15 - G7| estimate drops
/// below `tol`. A panel whose estimate sits at the rounding floor of its own
/// contribution is not split further. hi < lo yields the negated integral.
///
/// Throws QuadratureError when the panel budget is exhausted (reporting the
/// worst panel) or when f returns a non-finite sample (reporting where).
QuadratureResult integrate_detailed(const RealFunction& f, double lo, double hi,
                                    double tol = kDefaultQuadratureTol,
                                    std::size_t max_panels = kDefaultPanelBudget);

double integrate(const RealFunction& f, double lo, double hi,
                 double tol = kDefaultQuadratureTol,
                 std::size_t max_panels = kDefaultPanelBudget);

/// F(t) = integral of f from a to t, with checkpoint reuse.
///
/// Every evaluated t becomes a checkpoint; a query integrates only from the
/// nearest checkpoint. Queries at increasing t therefore cost one sweep in
/// total, and the nested case (the integrand of one CumulativeIntegral calls
/// another) stays cheap.
///
/// Not safe for unsynchronized concurrent use: evaluation mutates the cache.
class CumulativeIntegral {
 public:
  CumulativeIntegral(RealFunction f, double a, double tol = kDefaultQuadratureTol);

  double operator()(double t);

  double base() const { return a_; }
  double tolerance() const { return tol_; }
  std::size_t checkpoints() const { return cache_.size(); }

 private:
  RealFunction f_;
  double a_;
  double tol_;
  std::map<double, double> cache_;
};

CumulativeIntegral cumulative(RealFunction f, double a, double tol = kDefaultQuadratureTol);

}  // namespace lhsis
