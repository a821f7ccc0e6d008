#include "lhsis/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "format.hpp"
#include "lhsis/errors.hpp"

namespace lhsis {

namespace {

using detail::format_double;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(const StateVector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class RhsCaller {
 public:
  RhsCaller(const OdeRhs& rhs, std::size_t dim, SolverStats& stats)
      : rhs_(rhs), dim_(dim), stats_(stats) {}

  StateVector operator()(double t, const StateVector& y) const {
    ++stats_.rhs_evaluations;
    StateVector out = rhs_(t, y);
    if (out.size() != dim_) {
      throw std::invalid_argument("ODE right-hand side changed dimension");
    }
    return out;
  }

 private:
  const OdeRhs& rhs_;
  std::size_t dim_;
  SolverStats& stats_;
};

StateVector axpy(const StateVector& y, double h,
                 std::initializer_list<std::pair<double, const StateVector*>> terms) {
  StateVector out(y);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (const auto& [w, k] : terms) acc += w * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

void check_samples(const OdeProblem& p, std::span<const double> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < p.t0 || samples[i] > p.t_end) {
      throw std::invalid_argument("sample time " + format_double(samples[i]) +
                                  " outside [t0, t_end]");
    }
    if (i > 0 && samples[i] < samples[i - 1]) {
      throw std::invalid_argument("sample times must be sorted");
    }
  }
}

OdeTrajectory integrate_fixed(const OdeProblem& p, const IntegratorConfig& cfg,
                              std::span<const double> samples) {
  if (!(cfg.step > 0.0)) throw std::invalid_argument("RK4 step must be positive");
  OdeTrajectory out;
  RhsCaller f(p.rhs, p.state0.size(), out.stats);
  double t = p.t0;
  StateVector y = p.state0;

  auto evaluate = [&](double tt, const StateVector& yy) {
    try {
      StateVector k = f(tt, yy);
      if (!all_finite(k)) throw DomainError("non-finite value", tt);
      return k;
    } catch (const DomainError& e) {
      throw OdeError(OdeError::Kind::NonFiniteRhs,
                     "non-finite right-hand side near t=" + format_double(tt) + ": " + e.what(),
                     t);
    }
  };

  for (const double target : samples) {
    const double span = target - t;
    const auto n = static_cast<std::size_t>(std::max(0.0, std::ceil(span / cfg.step - 1e-9)));
    if (out.stats.accepted + n > cfg.max_steps) {
      throw OdeError(OdeError::Kind::MaxStepsExceeded, "RK4 step budget exhausted", t);
    }
    const double start = t;
    const double h = n > 0 ? span / static_cast<double>(n) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const StateVector k1 = evaluate(t, y);
      const StateVector k2 = evaluate(t + 0.5 * h, axpy(y, 0.5 * h, {{1.0, &k1}}));
      const StateVector k3 = evaluate(t + 0.5 * h, axpy(y, 0.5 * h, {{1.0, &k2}}));
      const StateVector k4 = evaluate(t + h, axpy(y, h, {{1.0, &k3}}));
      StateVector next = axpy(y, h / 6.0, {{1.0, &k1}, {2.0, &k2}, {2.0, &k3}, {1.0, &k4}});
      if (!all_finite(next)) {
        throw OdeError(OdeError::Kind::NonFiniteRhs,
                       "non-finite state after step at t=" + format_double(t), t);
      }
      y = std::move(next);
      t = (i + 1 == n) ? target : start + static_cast<double>(i + 1) * h;
      ++out.stats.accepted;
    }
    out.times.push_back(target);
    out.states.push_back(y);
  }
  return out;
}

double error_ratio(const StateVector& y0, const StateVector& y1, const StateVector& err,
                   const IntegratorConfig& cfg) {
  double worst = 0.0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

OdeTrajectory integrate_adaptive(const OdeProblem& p, const IntegratorConfig& cfg,
                                 std::span<const double> samples) {
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) {
    throw std::invalid_argument("adaptive tolerances must be positive");
  }
  OdeTrajectory out;
  RhsCaller f(p.rhs, p.state0.size(), out.stats);
  const std::size_t dim = p.state0.size();
  double t = p.t0;
  StateVector y = p.state0;
  std::size_t next_sample = 0;

  auto emit_until = [&](double limit, auto&& value_at) {
    while (next_sample < samples.size() && samples[next_sample] <= limit) {
      out.times.push_back(samples[next_sample]);
      out.states.push_back(value_at(samples[next_sample]));
      ++next_sample;
    }
  };
  emit_until(t, [&](double) { return y; });
  if (next_sample == samples.size()) return out;

  StateVector k1 = f(t, y);
  if (!all_finite(k1)) {
    throw OdeError(OdeError::Kind::NonFiniteRhs, "non-finite right-hand side at t0", t);
  }

  const double t_final = samples.back();
  double h;
  {
    double ynorm = 0.0, fnorm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double scale = cfg.atol + cfg.rtol * std::abs(y[i]);
      ynorm = std::max(ynorm, std::abs(y[i]) / scale);
      fnorm = std::max(fnorm, std::abs(k1[i]) / scale);
    }
    h = (ynorm < 1e-5 || fnorm < 1e-5) ? 1e-6 : 0.01 * ynorm / fnorm;
    h = std::min(h, t_final - t);
  }

  bool last_rejected = false;
  std::size_t steps = 0;
  while (next_sample < samples.size()) {
    if (++steps > cfg.max_steps) {
      throw OdeError(OdeError::Kind::MaxStepsExceeded,
                     "adaptive step budget exhausted at t=" + format_double(t), t);
    }
    if (h < 4.0 * kEps * std::max(1.0, std::abs(t))) {
      throw OdeError(OdeError::Kind::StepSizeUnderflow,
                     "step size underflow at t=" + format_double(t), t);
    }
    h = std::min(h, t_final - t);

    StateVector k2, k3, k4, k5, k6, k7, y1;
    bool finite = true;
    try {
      k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
      k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = f(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y1 = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      k7 = f(t + h, y1);
      finite = all_finite(k2) && all_finite(k3) && all_finite(k4) && all_finite(k5) &&
               all_finite(k6) && all_finite(k7) && all_finite(y1);
    } catch (const DomainError&) {
      finite = false;
    }

    double ratio = std::numeric_limits<double>::infinity();
    StateVector err;
    if (finite) {
      err = axpy(StateVector(dim, 0.0), h,
                 {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
      ratio = error_ratio(y, y1, err, cfg);
    }

    if (!(ratio <= 1.0)) {
      ++out.stats.rejected;
      const double shrink =
          std::isfinite(ratio) ? std::max(0.2, 0.9 * std::pow(ratio, -0.2)) : 0.2;
      h *= shrink;
      last_rejected = true;
      continue;
    }

    ++out.stats.accepted;
    const double t1 = (h == t_final - t) ? t_final : t + h;
    StateVector r2(dim), r3(dim), r4(dim), r5(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double diff = y1[i] - y[i];
      const double bspl = h * k1[i] - diff;
      r2[i] = diff;
      r3[i] = bspl;
      r4[i] = diff - h * k7[i] - bspl;
      r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    const double t_start = t;
    const StateVector y_start = y;
    emit_until(t1, [&](double ts) {
      if (ts == t1) return y1;
      const double s = (ts - t_start) / h;
      const double s1 = 1.0 - s;
      StateVector v(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        v[i] = y_start[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
      }
      return v;
    });

    t = t1;
    y = std::move(y1);
    k1 = std::move(k7);
    double grow = ratio == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(ratio, -0.2));
    if (last_rejected) grow = std::min(grow, 1.0);
    h *= std::max(grow, 0.2);
    last_rejected = false;
  }
  return out;
}

}  // namespace

OdeTrajectory integrate_ode(const OdeProblem& p, const IntegratorConfig& cfg,
                            std::span<const double> sample_times) {
  if (!p.rhs) throw std::invalid_argument("ODE problem has no right-hand side");
  if (p.state0.empty()) throw std::invalid_argument("ODE problem has an empty state");
  if (!(p.t_end >= p.t0)) throw std::invalid_argument("t_end must not precede t0");
  check_samples(p, sample_times);
  if (cfg.method == OdeMethod::FixedRk4) return integrate_fixed(p, cfg, sample_times);
  return integrate_adaptive(p, cfg, sample_times);
}

}  // namespace lhsis
