#include "cag/baseline.hpp"

#include <cmath>
#include <stdexcept>

#include "cag/cag_solver.hpp"
#include "cag/errors.hpp"
#include "cag/estimate_sequence.hpp"
#include "counted_run.hpp"

namespace cag {

namespace {
constexpr double kDecreaseSlack = 1e-12;
}

double QuadraticProblem::evaluate(std::span<const double> x, std::span<double> g) const {
  apply(x, g);
  const auto b = rhs();
  const double f = 0.5 * dot(x, g) - dot(b, x);
  axpy(-1.0, b, g);
  return f;
}

DenseQuadratic::DenseQuadratic(std::size_t n, Vector matrix, Vector b, double L, double ell,
                               std::string name)
    : n_(n), a_(std::move(matrix)), b_(std::move(b)), L_(L), ell_(ell), name_(std::move(name)) {
  if (a_.size() != n_ * n_ || b_.size() != n_) {
    throw std::invalid_argument("DenseQuadratic: matrix or rhs has wrong size");
  }
}

void DenseQuadratic::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    out[i] = dot(std::span<const double>(a_).subspan(i * n_, n_), x);
  }
}

SolverResult lcg_minimize(const QuadraticProblem& qp, std::span<const double> x0,
                          const LcgConfig& config) {
  const std::size_t n = qp.dimension();
  if (x0.size() != n) throw std::invalid_argument("lcg_minimize: x0 has wrong dimension");
  if (!(config.gtol > 0.0)) throw std::invalid_argument("lcg_minimize: gtol must be positive");

  std::int64_t applications = 0;
  std::vector<TraceRecord> trace;
  auto b = qp.rhs();
  Vector x(x0.begin(), x0.end());
  Vector r(b.begin(), b.end());
  Vector Ap(n);
  if (squared_norm(x) != 0.0) {
    qp.apply(x, Ap);
    ++applications;
    axpy(-1.0, Ap, r);
  }
  // With A x = b - r, f(x) = -x^T (b + r) / 2 needs no extra product.
  auto objective = [&](std::span<const double> xs, std::span<const double> rs) {
    return -0.5 * (dot(xs, b) + dot(xs, rs));
  };

  double rr = squared_norm(r);
  if (config.record_trace) {
    trace.push_back({0, applications, objective(x, r), std::sqrt(rr), kNoPhiStar, StepKind::kInit});
  }
  Vector p = r;
  std::int64_t iter = 0;
  SolverStatus status = SolverStatus::kBudgetExhausted;
  while (true) {
    if (std::sqrt(rr) <= config.gtol) {
      status = SolverStatus::kConverged;
      break;
    }
    if (iter >= config.max_iters) break;
    qp.apply(p, Ap);
    ++applications;
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) throw NotPositiveDefinite("lcg_minimize: p^T A p <= 0");
    const double alpha = rr / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    const double rr_next = squared_norm(r);
    axpby(1.0, r, rr_next / rr, p);
    rr = rr_next;
    ++iter;
    if (config.record_trace) {
      trace.push_back({iter, applications, objective(x, r), std::sqrt(rr), kNoPhiStar,
                       StepKind::kLinearCG});
    }
    if (config.observer) {
      IterationView view;
      view.iter = iter;
      view.step = StepKind::kLinearCG;
      view.x = x;
      view.f = objective(x, r);
      config.observer(view);
    }
  }
  SolverResult result;
  result.status = status;
  result.f_final = objective(x, r);
  result.gnorm_final = std::sqrt(rr);
  result.x_final = std::move(x);
  result.iterations = iter;
  result.evaluations = applications;
  result.trace = std::move(trace);
  return result;
}

SolverResult ncg_minimize(const Objective& problem, std::span<const double> x0,
                          const NcgConfig& config) {
  const std::size_t n = problem.dimension();
  if (x0.size() != n) throw std::invalid_argument("ncg_minimize: x0 has wrong dimension");
  if (!(config.L > 0.0) || !(config.gtol > 0.0) || config.max_evals <= 0) {
    throw std::invalid_argument("ncg_minimize: invalid configuration");
  }
  detail::CountedRun run(problem, config.max_evals, config.record_trace);
  const double L = config.L;
  std::int64_t iter = 0;
  StepKind kind = StepKind::kInit;
  try {
    Vector x(x0.begin(), x0.end());
    Evaluation cur = run.eval(x);
    double gnorm = norm2(cur.g);
    const double g0_norm = gnorm;
    run.record(0, cur.f, gnorm, kNoPhiStar, StepKind::kInit);
    if (gnorm <= config.gtol) return run.finish(SolverStatus::kConverged, x, cur.f, gnorm, 0);

    Vector p = combine(-1.0, cur.g, 0.0, cur.g);
    std::int64_t i_cg = 0;
    const auto restart_after = config.restart_interval_factor * static_cast<std::int64_t>(n) + 1;
    while (true) {
      kind = StepKind::kCG;
      if (i_cg >= restart_after || dot(cur.g, p) >= 0.0) {
        p = combine(-1.0, cur.g, 0.0, cur.g);
        i_cg = 0;
        kind = StepKind::kSteepestRetry;
      }
      const Vector probe_x = combine(1.0, x, 1.0 / L, p);
      const Evaluation probe = run.eval(probe_x);
      if (norm2(probe.g) <= config.gtol) {
        ++iter;
        run.record(iter, probe.f, norm2(probe.g), kNoPhiStar, kind);
        return run.finish(SolverStatus::kConverged, probe_x, probe.f, norm2(probe.g), iter);
      }
      double alpha = 1.0 / L;
      try {
        alpha = secant_alpha(cur.g, p, probe.g, L).alpha;
      } catch (const CurvatureFailure&) {
      }

      bool decreased = false;
      Vector x_next;
      Evaluation next;
      for (int t = 0; t <= config.backtrack_budget; ++t) {
        x_next = combine(1.0, x, alpha, p);
        next = run.eval(x_next);
        // Near the optimum f changes below its own rounding error; tolerate that.
        if (next.f <= cur.f + kDecreaseSlack * std::abs(cur.f) || norm2(next.g) <= config.gtol) {
          decreased = true;
          break;
        }
        alpha *= 0.5;
      }
      ++iter;
      if (!decreased) {
        run.record(iter, run.last_f(), run.last_gnorm(), kNoPhiStar, kind);
        return run.finish_best(SolverStatus::kLineSearchFailure, iter);
      }
      gnorm = norm2(next.g);
      if (gnorm <= config.gtol) {
        run.record(iter, next.f, gnorm, kNoPhiStar, kind);
        return run.finish(SolverStatus::kConverged, x_next, next.f, gnorm, iter);
      }
      double beta = 0.0;
      try {
        beta = hz_beta(cur.g, next.g, p, g0_norm);
      } catch (const DegenerateDirection&) {
        beta = 0.0;
      }
      p = combine(-1.0, next.g, beta, p);
      i_cg = beta == 0.0 ? 0 : i_cg + 1;
      x = std::move(x_next);
      cur = std::move(next);
      run.record(iter, cur.f, gnorm, kNoPhiStar, kind);
      if (config.observer) {
        IterationView view;
        view.iter = iter;
        view.step = kind;
        view.x = x;
        view.f = cur.f;
        config.observer(view);
      }
    }
  } catch (const detail::BudgetExceeded&) {
    if (run.unrecorded_evals()) run.record(++iter, run.last_f(), run.last_gnorm(), kNoPhiStar, kind);
    return run.finish_best(SolverStatus::kBudgetExhausted, iter);
  } catch (const NumericalFailure&) {
    if (run.unrecorded_evals()) run.record(++iter, run.last_f(), run.last_gnorm(), kNoPhiStar, kind);
    return run.finish_best(SolverStatus::kDiverged, iter);
  }
}

SolverResult ag_minimize(const Objective& problem, std::span<const double> x0,
                         const AgConfig& config) {
  const std::size_t n = problem.dimension();
  if (x0.size() != n) throw std::invalid_argument("ag_minimize: x0 has wrong dimension");
  if (!(config.L > 0.0) || config.ell < 0.0 || config.ell > config.L ||
      !(config.gtol > 0.0) || config.max_evals <= 0) {
    throw std::invalid_argument("ag_minimize: invalid configuration");
  }
  detail::CountedRun run(problem, config.max_evals, config.record_trace);
  std::int64_t iter = 0;
  try {
    Vector x(x0.begin(), x0.end());
    EstimateState estimate;
    while (true) {
      Vector anchor;
      Evaluation at_anchor;
      ThetaGamma tg;
      if (iter == 0) {
        // v_0 = x_0, so the first anchor is x_0 itself and its evaluation
        // also initializes the estimate sequence.
        anchor = x;
        at_anchor = run.eval(anchor);
        estimate = init_estimate(at_anchor.f, x, config.L, config.ell);
        tg = compute_theta_gamma(config.L, config.ell, estimate.gamma);
      } else {
        tg = compute_theta_gamma(config.L, config.ell, estimate.gamma);
        anchor = accelerated_anchor(estimate, tg, x);
        at_anchor = run.eval(anchor);
      }
      ++iter;
      const double gnorm = norm2(at_anchor.g);
      if (gnorm <= config.gtol) {
        run.record(iter, at_anchor.f, gnorm, estimate.phi_star, StepKind::kAG);
        return run.finish(SolverStatus::kConverged, anchor, at_anchor.f, gnorm, iter);
      }
      x = combine(1.0, anchor, -1.0 / config.L, at_anchor.g);
      estimate = advance_estimate(estimate, tg, anchor, at_anchor.f, at_anchor.g);
      run.record(iter, at_anchor.f, gnorm, estimate.phi_star, StepKind::kAG);
      if (config.observer) {
        IterationView view;
        view.iter = iter;
        view.step = StepKind::kAG;
        view.x = x;
        view.bar_x = anchor;
        view.bar_f = at_anchor.f;
        view.estimate = &estimate;
        view.theta_gamma = tg;
        config.observer(view);
      }
    }
  } catch (const detail::BudgetExceeded&) {
    return run.finish_best(SolverStatus::kBudgetExhausted, iter);
  } catch (const NumericalFailure&) {
    if (run.unrecorded_evals()) run.record(++iter, run.last_f(), run.last_gnorm(), kNoPhiStar, StepKind::kAG);
    return run.finish_best(SolverStatus::kDiverged, iter);
  }
}

}  // namespace cag
