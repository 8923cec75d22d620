#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cag/estimate_sequence.hpp"
#include "cag/vec.hpp"

namespace cag {

enum class StepKind {
  kInit,           // the evaluation at x0
  kCG,             // accepted conjugate-gradient step
  kSteepestRetry,  // accepted steepest-descent retry
  kAG,             // accelerated-gradient step
  kBarAugmented,   // accepted CG step with the conjugate-z bar iterate
  kLinearCG,       // linear CG iteration on an explicit quadratic
};

std::string_view step_label(StepKind kind);

enum class SolverStatus { kConverged, kBudgetExhausted, kLineSearchFailure, kDiverged };

std::string_view status_label(SolverStatus status);

inline constexpr double kNoPhiStar = std::numeric_limits<double>::quiet_NaN();

struct TraceRecord {
  std::int64_t iter = 0;
  std::int64_t evals = 0;  // cumulative
  double f = 0.0;
  double gnorm = 0.0;
  double phi_star = kNoPhiStar;
  StepKind step = StepKind::kInit;
};

struct SolverResult {
  SolverStatus status = SolverStatus::kBudgetExhausted;
  Vector x_final;
  double f_final = 0.0;
  double gnorm_final = 0.0;
  std::int64_t iterations = 0;
  std::int64_t evaluations = 0;
  std::vector<TraceRecord> trace;
};

std::int64_t count_steps(const std::vector<TraceRecord>& trace, StepKind kind);

// Snapshot handed to an observer after every completed iteration. x is the
// new iterate x_{k+1}; f is NaN when the method did not evaluate there (AG).
struct IterationView {
  std::int64_t iter = 0;
  StepKind step = StepKind::kInit;
  std::span<const double> x;
  double f = std::numeric_limits<double>::quiet_NaN();
  std::span<const double> bar_x;
  double bar_f = std::numeric_limits<double>::quiet_NaN();
  const EstimateState* estimate = nullptr;
  std::optional<ThetaGamma> theta_gamma;
};

using IterationObserver = std::function<void(const IterationView&)>;

}  // namespace cag
