#pragma once

// Reference ODE integrators. These share no code with the closed-form
// evaluators; the exact solutions are checked against both methods.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lhsis {

using StateVector = std::vector<double>;
using OdeRhs = std::function<StateVector(double, const StateVector&)>;

struct OdeProblem {
  OdeRhs rhs;
  double t0 = 0.0;
  StateVector state0;
  double t_end = 0.0;
};

enum class OdeMethod { FixedRk4, AdaptiveDormandPrince };

struct IntegratorConfig {
  OdeMethod method = OdeMethod::AdaptiveDormandPrince;
  double step = 1e-3;  ///< FixedRk4 step (shortened to land on sample times)
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 5'000'000;
};

struct SolverStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  SolverStats stats;
};

/// Integrates from p.t0 and reports the state at each sample time.
///
/// sample_times must be sorted within [t0, t_end]. The adaptive method
/// bounds the local error of every accepted step by rtol |state| + atol
/// (max-norm) and interpolates samples with its 4th-order dense output.
/// A step whose stages turn non-finite is rejected and retried smaller.
///
/// Throws OdeError on step-size underflow, max_steps, or (FixedRk4) a
/// non-finite right-hand side; the error carries the last good time.
OdeTrajectory integrate_ode(const OdeProblem& p, const IntegratorConfig& cfg,
                            std::span<const double> sample_times);

}  // namespace lhsis
