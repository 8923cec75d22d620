#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "cag/estimate_sequence.hpp"
#include "cag/oracle.hpp"
#include "cag/solver_types.hpp"

namespace cag {

struct CagConfig {
  double L = 1.0;
  double ell = 0.0;
  double gtol = 1e-8;  // on the 2-norm of the gradient
  std::int64_t max_evals = 1'000'000;
  int restart_interval_factor = 10;  // forced restart once i_cg >= factor * n + 1
  double ag_exit_factor = 4.0;
  bool conjugate_z_mode = false;
  bool record_trace = true;
  IterationObserver observer;

  void validate() const;
};

// Probe point x + p/L, evaluated once.
struct SecantProbe {
  Vector x;
  double f = 0.0;
  Vector g;
};

struct SecantStep {
  double alpha = 0.0;
  Vector Ap;  // L (g(x + p/L) - g(x)); exactly A p on a quadratic
  double pAp = 0.0;
};

SecantProbe secant_probe(const Objective& problem, EvalCounter& counter,
                         std::span<const double> x, std::span<const double> p, double L);

// alpha = -g^T p / p^T Ap. Throws CurvatureFailure when p^T Ap <= 0.
SecantStep secant_alpha(std::span<const double> g, std::span<const double> p,
                        std::span<const double> probe_g, double L);

// Hager-Zhang beta with the lower safeguard
//   -1 / (||p|| min(0.01 ||g0||, ||g_next||)).
// Throws DegenerateDirection when (g_next - g)^T p == 0.
double hz_beta(std::span<const double> g, std::span<const double> g_next,
               std::span<const double> p, double g0_norm);

struct ZUpdate {
  Vector z_tilde;
  double zAz = 0.0;
  double zAp = 0.0;
  double delta = 0.0;
};

// Removes the A-component of z_tilde along p: z' = z - (z^T Ap / pAp) p.
// Throws CurvatureFailure when pAp <= 0.
ZUpdate z_conjugate_update(std::span<const double> z_tilde, double zAz,
                           std::span<const double> p, std::span<const double> Ap, double pAp);

// x_next + alpha z with alpha = -g_next^T z / zAz, the line minimizer along z
// on a quadratic. Throws CurvatureFailure when zAz <= 0.
Vector bar_point(std::span<const double> x_next, std::span<const double> g_next,
                 std::span<const double> z_tilde, double zAz);

struct BarIterate {
  Vector x;
  double f = 0.0;
  Vector g;
};

BarIterate bar_augment(std::span<const double> x_next, std::span<const double> g_next,
                       std::span<const double> z_tilde, double zAz,
                       const Objective& problem, EvalCounter& counter);

// (theta gamma v + gamma_next x) / (gamma + theta ell): the point where an
// accelerated step evaluates the gradient.
Vector accelerated_anchor(const EstimateState& estimate, const ThetaGamma& tg,
                          std::span<const double> x);

bool ag_block_exit_test(double bar_gnorm, double bar_gnorm_at_entry, double factor);

struct CagIterationState {
  std::int64_t k = 0;
  Vector x;
  double f = 0.0;
  Vector g;
  bool fg_current = true;  // false inside an AG block: f, g belong to an older point
  Vector p;
  EstimateState estimate;
  std::int64_t i_cg = 0;
  bool only_ag = false;
  std::int64_t k_ag = -1;
  double bar_gnorm_at_ag_entry = 0.0;
  Vector bar_x;
  double bar_f = 0.0;
  Vector bar_g;
  bool zflag = false;
  Vector z_tilde;
  double zAz = 0.0;
  double zAz_initial = 0.0;
  double g0_norm = 0.0;
};

// Conjugate gradient steps guarded by the estimate-sequence progress test,
// with a steepest-descent retry and then a block of accelerated-gradient
// steps as fallbacks. step() runs one outer iteration.
class CagSolver {
 public:
  CagSolver(const Objective& problem, std::span<const double> x0, CagConfig config);

  // Starts from a caller-supplied estimate (for example the state left by a
  // block of AG steps). With conjugate_z_mode set and v != x0, the first CG
  // block uses the conjugate-z bar iterate, exactly as after an AG block.
  CagSolver(const Objective& problem, std::span<const double> x0, CagConfig config,
            const EstimateState& initial_estimate);

  // Returns false once the run has finished.
  bool step();
  SolverResult run();

  bool finished() const { return finished_; }
  SolverResult result() const;
  const CagIterationState& state() const { return state_; }
  const EvalCounter& counter() const { return counter_; }
  const CagConfig& config() const { return config_; }

  enum class AttemptOutcome { kAccepted, kRejected, kConverged };

  // One CG attempt from x_k (steepest descent when use_steepest). Leaves the
  // state untouched unless the progress test passes.
  AttemptOutcome cg_attempt(const ThetaGamma& tg, bool use_steepest);
  // One accelerated step; returns true when the anchor point converged.
  bool ag_step(const ThetaGamma& tg);
  // Leaves an AG block: evaluates at x_{k+1}, restarts the direction and, in
  // conjugate-z mode, sets up z = v - x. Returns true when x_{k+1} converged.
  bool return_to_cg();

 private:
  Evaluation eval(std::span<const double> x);
  void initialize(std::span<const double> x0, const std::optional<EstimateState>& initial);
  void setup_z(std::span<const double> v);
  void finish(SolverStatus status, std::span<const double> x, double f, double gnorm);
  void push_record(StepKind kind, double f, double gnorm);
  void notify(StepKind kind, const ThetaGamma& tg);

  const Objective& problem_;
  CagConfig config_;
  EvalCounter counter_;
  CagIterationState state_;

  bool finished_ = false;
  SolverStatus status_ = SolverStatus::kBudgetExhausted;
  Vector x_final_;
  double f_final_ = 0.0;
  double gnorm_final_ = 0.0;
  std::int64_t iterations_ = 0;
  std::vector<TraceRecord> trace_;
  std::int64_t evals_at_last_record_ = 0;

  // Lowest-f point seen, returned on abnormal exits.
  Vector best_x_;
  double best_f_ = 0.0;
  double best_gnorm_ = 0.0;
  bool have_best_ = false;
  double last_f_ = 0.0;
  double last_gnorm_ = 0.0;
  StepKind current_kind_ = StepKind::kInit;
};

SolverResult cag_minimize(const Objective& problem, std::span<const double> x0,
                          const CagConfig& config);

}  // namespace cag
