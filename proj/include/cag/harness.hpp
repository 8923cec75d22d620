#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cag/problems.hpp"
#include "cag/solver_types.hpp"

namespace cag {

enum class SolverKind { kCag, kAg, kNcg, kLcg };

std::string_view solver_label(SolverKind kind);
SolverKind parse_solver(std::string_view text);  // throws InvalidSpec

struct RunConfig {
  ProblemSpec problem;
  SolverKind solver = SolverKind::kCag;
  double gtol = 1e-8;
  std::optional<std::int64_t> max_evals;  // per-solver default when unset
  std::optional<double> L;                // family default when unset
  std::optional<double> ell;
  bool conjugate_z = false;
  std::string trace_path;  // empty: no trace file
  std::string json_path;   // empty: no summary file

  void validate() const;
};

// 1,000,000 evaluations for every solver: AG spends one per iteration, the
// CG variants about two, matching iteration caps of 1e6 and 5e5.
std::int64_t default_max_evals(SolverKind solver);

struct RunOutcome {
  std::string problem_name;
  SolverKind solver = SolverKind::kCag;
  double L = 0.0;
  double ell = 0.0;
  double gtol = 0.0;
  SolverResult result;
  double wall_seconds = 0.0;
};

// Builds the problem, resolves L and ell (override, else family default),
// runs the solver and writes the trace CSV / summary JSON when paths are
// set. Throws InvalidSpec for lcg on a non-quadratic family.
RunOutcome run(const RunConfig& config);

// Header iter,evals,f,gnorm,phistar,step; reals with 17 significant digits.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
std::string summary_json(const RunOutcome& outcome);

struct SummaryRow {
  std::string problem;
  std::string solver;
  std::string status;  // solver status, or "error"
  std::int64_t evaluations = 0;
  std::int64_t iterations = 0;
  double f_final = 0.0;
  double gnorm_final = 0.0;
  double wall_seconds = 0.0;
  bool best = false;  // fewest evaluations among converged runs on this problem
  std::string error;
};

// Runs every configuration, up to `parallelism` at a time. Rows come back in
// input order; a failing run becomes an "error" row.
std::vector<SummaryRow> run_suite(const std::vector<RunConfig>& configs, int parallelism);

void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// Suite files are key-value blocks (see parse_key_value_blocks). Besides the
// problem keys a block takes solver or solvers (comma list), gtol,
// max_evals, L, ell and conjugate_z. Each listed solver becomes one run.
std::vector<RunConfig> parse_suite(std::string_view text);

}  // namespace cag
