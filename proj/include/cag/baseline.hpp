#pragma once

#include <cstdint>
#include <span>

#include "cag/oracle.hpp"
#include "cag/quadratic.hpp"
#include "cag/solver_types.hpp"

namespace cag {

struct LcgConfig {
  double gtol = 1e-8;
  std::int64_t max_iters = 1'000'000;
  bool record_trace = true;
  IterationObserver observer;
};

// Hestenes-Stiefel linear CG. One application of A per iteration, counted as
// one evaluation; the initial residual costs one more unless x0 = 0.
// Throws NotPositiveDefinite when p^T A p <= 0.
SolverResult lcg_minimize(const QuadraticProblem& qp, std::span<const double> x0,
                          const LcgConfig& config);

struct NcgConfig {
  double L = 1.0;  // scales the secant probe x + p/L
  double gtol = 1e-8;
  std::int64_t max_evals = 1'000'000;
  int restart_interval_factor = 10;
  int backtrack_budget = 30;
  bool record_trace = true;
  IterationObserver observer;
};

// Nonlinear CG with the Hager-Zhang beta and the secant step, safeguarded by
// halving the step until f does not increase. No progress test, no fallback.
SolverResult ncg_minimize(const Objective& problem, std::span<const double> x0,
                          const NcgConfig& config);

struct AgConfig {
  double L = 1.0;
  double ell = 0.0;
  double gtol = 1e-8;
  std::int64_t max_evals = 1'000'000;
  bool record_trace = true;
  IterationObserver observer;
};

// Accelerated gradient driven by the estimate sequence: one evaluation per
// iteration at the anchor point, then a 1/L gradient step from it.
SolverResult ag_minimize(const Objective& problem, std::span<const double> x0,
                         const AgConfig& config);

}  // namespace cag
