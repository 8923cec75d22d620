#include "cag/cag_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cag/errors.hpp"

namespace cag {

namespace {

struct BudgetExceeded {};

const double kZExhausted = std::sqrt(std::numeric_limits<double>::epsilon());

}  // namespace

std::string_view step_label(StepKind kind) {
  switch (kind) {
    case StepKind::kInit:
      return "init";
    case StepKind::kCG:
      return "cg";
    case StepKind::kSteepestRetry:
      return "sd";
    case StepKind::kAG:
      return "ag";
    case StepKind::kBarAugmented:
      return "bar";
    case StepKind::kLinearCG:
      return "lcg";
  }
  return "?";
}

std::string_view status_label(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged:
      return "converged";
    case SolverStatus::kBudgetExhausted:
      return "budget_exhausted";
    case SolverStatus::kLineSearchFailure:
      return "line_search_failure";
    case SolverStatus::kDiverged:
      return "diverged";
  }
  return "?";
}

std::int64_t count_steps(const std::vector<TraceRecord>& trace, StepKind kind) {
  std::int64_t n = 0;
  for (const auto& r : trace) n += r.step == kind ? 1 : 0;
  return n;
}

void CagConfig::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidSpec("CagConfig: L must be positive");
  if (!(ell >= 0.0) || ell > L) throw InvalidSpec("CagConfig: need 0 <= ell <= L");
  if (!(gtol > 0.0)) throw InvalidSpec("CagConfig: gtol must be positive");
  if (max_evals <= 0) throw InvalidSpec("CagConfig: max_evals must be positive");
  if (restart_interval_factor < 1) {
    throw InvalidSpec("CagConfig: restart_interval_factor must be >= 1");
  }
  if (!(ag_exit_factor > 1.0)) throw InvalidSpec("CagConfig: ag_exit_factor must exceed 1");
}

SecantProbe secant_probe(const Objective& problem, EvalCounter& counter,
                         std::span<const double> x, std::span<const double> p, double L) {
  SecantProbe probe;
  probe.x = combine(1.0, x, 1.0 / L, p);
  Evaluation ev = evaluate_counted(problem, probe.x, counter);
  probe.f = ev.f;
  probe.g = std::move(ev.g);
  return probe;
}

SecantStep secant_alpha(std::span<const double> g, std::span<const double> p,
                        std::span<const double> probe_g, double L) {
  SecantStep step;
  step.Ap = combine(L, probe_g, -L, g);
  step.pAp = dot(p, step.Ap);
  if (!(step.pAp > 0.0) || !std::isfinite(step.pAp)) {
    throw CurvatureFailure("secant_alpha: non-positive curvature along p");
  }
  step.alpha = -dot(g, p) / step.pAp;
  return step;
}

double hz_beta(std::span<const double> g, std::span<const double> g_next,
               std::span<const double> p, double g0_norm) {
  const Vector y = combine(1.0, g_next, -1.0, g);
  const double yp = dot(y, p);
  if (yp == 0.0 || !std::isfinite(yp)) throw DegenerateDirection("hz_beta: y^T p = 0");
  const double yy = dot(y, y);
  const double yg = dot(y, g_next);
  const double pg = dot(p, g_next);
  const double beta1 = (yg - 2.0 * yy / yp * pg) / yp;
  const double beta2 = -1.0 / (norm2(p) * std::min(0.01 * g0_norm, norm2(g_next)));
  return std::max(beta1, beta2);
}

ZUpdate z_conjugate_update(std::span<const double> z_tilde, double zAz,
                           std::span<const double> p, std::span<const double> Ap, double pAp) {
  if (!(pAp > 0.0)) throw CurvatureFailure("z_conjugate_update: pAp must be positive");
  ZUpdate out;
  out.zAp = dot(z_tilde, Ap);
  out.delta = out.zAp / pAp;
  out.z_tilde = combine(1.0, z_tilde, -out.delta, p);
  out.zAz = zAz - 2.0 * out.delta * out.zAp + out.delta * out.delta * pAp;
  return out;
}

Vector bar_point(std::span<const double> x_next, std::span<const double> g_next,
                 std::span<const double> z_tilde, double zAz) {
  if (!(zAz > 0.0)) throw CurvatureFailure("bar_point: zAz must be positive");
  const double alpha = -dot(g_next, z_tilde) / zAz;
  return combine(1.0, x_next, alpha, z_tilde);
}

BarIterate bar_augment(std::span<const double> x_next, std::span<const double> g_next,
                       std::span<const double> z_tilde, double zAz,
                       const Objective& problem, EvalCounter& counter) {
  BarIterate out;
  out.x = bar_point(x_next, g_next, z_tilde, zAz);
  Evaluation ev = evaluate_counted(problem, out.x, counter);
  out.f = ev.f;
  out.g = std::move(ev.g);
  return out;
}

Vector accelerated_anchor(const EstimateState& estimate, const ThetaGamma& tg,
                          std::span<const double> x) {
  const double denom = estimate.gamma + tg.theta * estimate.ell;
  return combine(tg.theta * estimate.gamma / denom, estimate.v, tg.gamma_next / denom, x);
}

bool ag_block_exit_test(double bar_gnorm, double bar_gnorm_at_entry, double factor) {
  return bar_gnorm <= bar_gnorm_at_entry / factor;
}

CagSolver::CagSolver(const Objective& problem, std::span<const double> x0, CagConfig config)
    : problem_(problem), config_(std::move(config)) {
  config_.validate();
  initialize(x0, std::nullopt);
}

CagSolver::CagSolver(const Objective& problem, std::span<const double> x0, CagConfig config,
                     const EstimateState& initial_estimate)
    : problem_(problem), config_(std::move(config)) {
  config_.validate();
  initialize(x0, initial_estimate);
}

Evaluation CagSolver::eval(std::span<const double> x) {
  if (counter_.count() >= config_.max_evals) throw BudgetExceeded{};
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

void CagSolver::initialize(std::span<const double> x0,
                           const std::optional<EstimateState>& initial) {
  if (x0.size() != problem_.dimension()) {
    throw std::invalid_argument("CagSolver: x0 has wrong dimension");
  }
  if (initial && initial->v.size() != x0.size()) {
    throw std::invalid_argument("CagSolver: initial estimate has wrong dimension");
  }
  auto& s = state_;
  s.x.assign(x0.begin(), x0.end());
  try {
    Evaluation ev = eval(s.x);
    s.f = ev.f;
    s.g = std::move(ev.g);
  } catch (const NumericalFailure&) {
    finish(SolverStatus::kDiverged, s.x, last_f_, last_gnorm_);
    return;
  }
  s.g0_norm = norm2(s.g);
  if (initial) {
    s.estimate = *initial;
    s.estimate.L = config_.L;
    s.estimate.ell = config_.ell;
  } else {
    s.estimate = init_estimate(s.f, s.x, config_.L, config_.ell);
  }
  s.bar_x = s.x;
  s.bar_f = s.f;
  s.bar_g = s.g;
  s.p = combine(-1.0, s.g, 0.0, s.g);
  push_record(StepKind::kInit, s.f, s.g0_norm);
  if (s.g0_norm <= config_.gtol) {
    finish(SolverStatus::kConverged, s.x, s.f, s.g0_norm);
    return;
  }
  if (initial && config_.conjugate_z_mode) {
    try {
      setup_z(s.estimate.v);
    } catch (const BudgetExceeded&) {
      finish(SolverStatus::kBudgetExhausted, best_x_, best_f_, best_gnorm_);
    } catch (const NumericalFailure&) {
      finish(SolverStatus::kDiverged, best_x_, best_f_, best_gnorm_);
    }
    if (!trace_.empty() && counter_.count() > evals_at_last_record_) {
      trace_.back().evals = counter_.count();
      evals_at_last_record_ = counter_.count();
    }
  }
}

void CagSolver::setup_z(std::span<const double> v) {
  auto& s = state_;
  s.zflag = false;
  Vector z = combine(1.0, v, -1.0, s.x);
  if (squared_norm(z) == 0.0) return;
  Evaluation at_v = eval(v);
  const double zAz = dot(z, combine(1.0, at_v.g, -1.0, s.g));
  if (zAz > 0.0 && std::isfinite(zAz)) {
    s.z_tilde = std::move(z);
    s.zAz = zAz;
    s.zAz_initial = zAz;
    s.zflag = true;
  }
}

void CagSolver::finish(SolverStatus status, std::span<const double> x, double f, double gnorm) {
  finished_ = true;
  status_ = status;
  x_final_.assign(x.begin(), x.end());
  f_final_ = f;
  gnorm_final_ = gnorm;
}

void CagSolver::push_record(StepKind kind, double f, double gnorm) {
  evals_at_last_record_ = counter_.count();
  if (!config_.record_trace) return;
  trace_.push_back(TraceRecord{iterations_, counter_.count(), f, gnorm,
                               state_.estimate.phi_star, kind});
}

void CagSolver::notify(StepKind kind, const ThetaGamma& tg) {
  if (!config_.observer) return;
  const auto& s = state_;
  IterationView view;
  view.iter = iterations_;
  view.step = kind;
  view.x = s.x;
  if (s.fg_current) view.f = s.f;
  view.bar_x = s.bar_x;
  view.bar_f = s.bar_f;
  view.estimate = &s.estimate;
  view.theta_gamma = tg;
  config_.observer(view);
}

CagSolver::AttemptOutcome CagSolver::cg_attempt(const ThetaGamma& tg, bool use_steepest) {
  auto& s = state_;
  if (s.only_ag) throw InvalidState("cg_attempt called inside an AG block");
  const double L = config_.L;
  if (use_steepest) {
    s.p = combine(-1.0, s.g, 0.0, s.g);
    s.i_cg = 0;
  }
  const Vector& p = s.p;

  const Vector probe_x = combine(1.0, s.x, 1.0 / L, p);
  const Evaluation probe = eval(probe_x);
  const double probe_gnorm = norm2(probe.g);
  if (probe_gnorm <= config_.gtol) {
    finish(SolverStatus::kConverged, probe_x, probe.f, probe_gnorm);
    return AttemptOutcome::kConverged;
  }

  SecantStep secant;
  try {
    secant = secant_alpha(s.g, p, probe.g, L);
  } catch (const CurvatureFailure&) {
    return AttemptOutcome::kRejected;
  }

  Vector x_next = combine(1.0, s.x, secant.alpha, p);
  Evaluation next = eval(x_next);
  const double next_gnorm = norm2(next.g);
  if (next_gnorm <= config_.gtol) {
    finish(SolverStatus::kConverged, x_next, next.f, next_gnorm);
    return AttemptOutcome::kConverged;
  }

  // Bar iterate for the next progress test: x_next itself, or the line
  // minimizer along the conjugated z direction.
  bool keep_z = s.zflag;
  ZUpdate zu;
  Vector bar_x;
  Evaluation bar;
  if (keep_z) {
    zu = z_conjugate_update(s.z_tilde, s.zAz, p, secant.Ap, secant.pAp);
    // The tracked zAz carries an absolute error of order eps * zAz_initial;
    // below sqrt(eps) * zAz_initial z has been conjugated away and is noise.
    keep_z = std::isfinite(zu.zAz) && zu.zAz > kZExhausted * s.zAz_initial;
  }
  if (keep_z) {
    bar_x = bar_point(x_next, next.g, zu.z_tilde, zu.zAz);
    bar = eval(bar_x);
    const double bar_gnorm = norm2(bar.g);
    if (bar_gnorm <= config_.gtol) {
      finish(SolverStatus::kConverged, bar_x, bar.f, bar_gnorm);
      return AttemptOutcome::kConverged;
    }
  } else {
    bar_x = x_next;
    bar = next;
  }

  EstimateState advanced = advance_estimate(s.estimate, tg, s.bar_x, s.bar_f, s.bar_g);
  const bool progress = next.f <= advanced.phi_star || bar.f <= advanced.phi_star;
  if (!progress) return AttemptOutcome::kRejected;

  double beta = 0.0;
  try {
    beta = hz_beta(s.g, next.g, p, s.g0_norm);
  } catch (const DegenerateDirection&) {
    beta = 0.0;
  }
  Vector p_next = combine(-1.0, next.g, beta, p);

  s.x = std::move(x_next);
  s.f = next.f;
  s.g = std::move(next.g);
  s.fg_current = true;
  s.p = std::move(p_next);
  s.estimate = std::move(advanced);
  s.bar_x = std::move(bar_x);
  s.bar_f = bar.f;
  s.bar_g = keep_z ? std::move(bar.g) : s.g;
  s.zflag = keep_z;
  if (keep_z) {
    s.z_tilde = std::move(zu.z_tilde);
    s.zAz = zu.zAz;
  }
  s.i_cg = beta == 0.0 ? 0 : s.i_cg + 1;
  return AttemptOutcome::kAccepted;
}

bool CagSolver::ag_step(const ThetaGamma& tg) {
  auto& s = state_;
  bool entering = false;
  if (!s.only_ag) {
    s.only_ag = true;
    s.k_ag = s.k;
    entering = true;
  }
  Vector anchor = accelerated_anchor(s.estimate, tg, s.x);
  Evaluation at_anchor = eval(anchor);
  const double gnorm = norm2(at_anchor.g);
  if (entering) s.bar_gnorm_at_ag_entry = gnorm;
  if (gnorm <= config_.gtol) {
    finish(SolverStatus::kConverged, anchor, at_anchor.f, gnorm);
    return true;
  }
  s.x = combine(1.0, anchor, -1.0 / config_.L, at_anchor.g);
  s.fg_current = false;
  s.estimate = advance_estimate(s.estimate, tg, anchor, at_anchor.f, at_anchor.g);
  s.bar_x = std::move(anchor);
  s.bar_f = at_anchor.f;
  s.bar_g = std::move(at_anchor.g);
  return false;
}

bool CagSolver::return_to_cg() {
  auto& s = state_;
  Evaluation ev = eval(s.x);
  s.f = ev.f;
  s.g = std::move(ev.g);
  s.fg_current = true;
  const double gnorm = norm2(s.g);
  if (gnorm <= config_.gtol) {
    finish(SolverStatus::kConverged, s.x, s.f, gnorm);
    return true;
  }
  s.bar_x = s.x;
  s.bar_f = s.f;
  s.bar_g = s.g;
  s.p = combine(-1.0, s.g, 0.0, s.g);
  s.i_cg = 0;
  s.only_ag = false;
  s.zflag = false;
  if (config_.conjugate_z_mode) setup_z(s.estimate.v);
  return false;
}

bool CagSolver::step() {
  if (finished_) return false;
  auto& s = state_;
  StepKind kind = StepKind::kCG;
  try {
    const auto n = static_cast<std::int64_t>(s.x.size());
    if (!s.only_ag && s.i_cg >= config_.restart_interval_factor * n + 1) {
      s.p = combine(-1.0, s.g, 0.0, s.g);
      s.i_cg = 0;
    }
    const ThetaGamma tg = compute_theta_gamma(config_.L, config_.ell, s.estimate.gamma);

    if (!s.only_ag) {
      for (int attempt = 1; attempt <= 2; ++attempt) {
        kind = attempt == 2 ? StepKind::kSteepestRetry
                            : (s.zflag ? StepKind::kBarAugmented : StepKind::kCG);
        const AttemptOutcome outcome = cg_attempt(tg, attempt == 2);
        if (outcome == AttemptOutcome::kConverged) {
          ++iterations_;
          push_record(kind, f_final_, gnorm_final_);
          return false;
        }
        if (outcome == AttemptOutcome::kAccepted) {
          ++s.k;
          ++iterations_;
          push_record(kind, s.f, norm2(s.g));
          notify(kind, tg);
          return true;
        }
      }
    }

    kind = StepKind::kAG;
    if (ag_step(tg)) {
      ++iterations_;
      push_record(kind, f_final_, gnorm_final_);
      return false;
    }
    const double bar_gnorm = norm2(s.bar_g);
    bool left_block = false;
    if (ag_block_exit_test(bar_gnorm, s.bar_gnorm_at_ag_entry, config_.ag_exit_factor)) {
      if (return_to_cg()) {
        ++iterations_;
        push_record(kind, f_final_, gnorm_final_);
        return false;
      }
      left_block = true;
    }
    ++s.k;
    ++iterations_;
    if (left_block) {
      push_record(kind, s.f, norm2(s.g));
    } else {
      push_record(kind, s.bar_f, bar_gnorm);
    }
    notify(kind, tg);
    return true;
  } catch (const BudgetExceeded&) {
    if (counter_.count() > evals_at_last_record_) {
      ++iterations_;
      push_record(kind, last_f_, last_gnorm_);
    }
    finish(SolverStatus::kBudgetExhausted, best_x_, best_f_, best_gnorm_);
  } catch (const NumericalFailure&) {
    if (counter_.count() > evals_at_last_record_) {
      ++iterations_;
      push_record(kind, last_f_, last_gnorm_);
    }
    finish(SolverStatus::kDiverged, best_x_, best_f_, best_gnorm_);
  }
  return false;
}

SolverResult CagSolver::run() {
  while (step()) {
  }
  return result();
}

SolverResult CagSolver::result() const {
  SolverResult r;
  r.status = finished_ ? status_ : SolverStatus::kBudgetExhausted;
  r.x_final = finished_ ? x_final_ : state_.x;
  r.f_final = finished_ ? f_final_ : state_.f;
  r.gnorm_final = finished_ ? gnorm_final_ : norm2(state_.g);
  r.iterations = iterations_;
  r.evaluations = counter_.count();
  r.trace = trace_;
  return r;
}

SolverResult cag_minimize(const Objective& problem, std::span<const double> x0,
                          const CagConfig& config) {
  return CagSolver(problem, x0, config).run();
}

}  // namespace cag
