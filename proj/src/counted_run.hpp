#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cag/oracle.hpp"
#include "cag/solver_types.hpp"

namespace cag::detail {

struct BudgetExceeded {};

// Bookkeeping shared by the baseline solvers: budgeted evaluation, the
// lowest-f point seen, and the trace.
class CountedRun {
 public:
  CountedRun(const Objective& problem, std::int64_t max_evals, bool record_trace)
      : problem_(problem), max_evals_(max_evals), record_trace_(record_trace) {}

  Evaluation eval(std::span<const double> x) {
    if (counter_.count() >= max_evals_) throw BudgetExceeded{};
    Evaluation ev = evaluate_counted(problem_, x, counter_);
    last_f_ = ev.f;
    last_gnorm_ = norm2(ev.g);
    if (!have_best_ || ev.f < best_f_) {
      best_x_.assign(x.begin(), x.end());
      best_f_ = ev.f;
      best_gnorm_ = last_gnorm_;
      have_best_ = true;
    }
    return ev;
  }

  void record(std::int64_t iter, double f, double gnorm, double phi_star, StepKind kind) {
    evals_at_last_record_ = counter_.count();
    if (record_trace_) trace_.push_back(TraceRecord{iter, counter_.count(), f, gnorm, phi_star, kind});
  }

  bool unrecorded_evals() const { return counter_.count() > evals_at_last_record_; }

  SolverResult finish(SolverStatus status, std::span<const double> x, double f, double gnorm,
                      std::int64_t iterations) {
    SolverResult r;
    r.status = status;
    r.x_final.assign(x.begin(), x.end());
    r.f_final = f;
    r.gnorm_final = gnorm;
    r.iterations = iterations;
    r.evaluations = counter_.count();
    r.trace = std::move(trace_);
    return r;
  }

  SolverResult finish_best(SolverStatus status, std::int64_t iterations) {
    return finish(status, best_x_, best_f_, best_gnorm_, iterations);
  }

  double last_f() const { return last_f_; }
  double last_gnorm() const { return last_gnorm_; }

 private:
  const Objective& problem_;
  std::int64_t max_evals_;
  bool record_trace_;
  EvalCounter counter_;
  std::vector<TraceRecord> trace_;
  std::int64_t evals_at_last_record_ = 0;
  Vector best_x_;
  double best_f_ = 0.0;
  double best_gnorm_ = 0.0;
  bool have_best_ = false;
  double last_f_ = 0.0;
  double last_gnorm_ = 0.0;
};

}  // namespace cag::detail
