#include "cag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cag/baseline.hpp"
#include "cag/cag_solver.hpp"
#include "cag/errors.hpp"

namespace cag {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim_copy(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidSpec("'" + key + "' expects a number, got '" + text + "'");
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidSpec("'" + key + "' expects true/false, got '" + text + "'");
}

}  // namespace

std::string_view solver_label(SolverKind kind) {
  switch (kind) {
    case SolverKind::kCag:
      return "cag";
    case SolverKind::kAg:
      return "ag";
    case SolverKind::kNcg:
      return "ncg";
    case SolverKind::kLcg:
      return "lcg";
  }
  return "?";
}

SolverKind parse_solver(std::string_view text) {
  if (text == "cag") return SolverKind::kCag;
  if (text == "ag") return SolverKind::kAg;
  if (text == "ncg") return SolverKind::kNcg;
  if (text == "lcg") return SolverKind::kLcg;
  throw InvalidSpec("unknown solver '" + std::string(text) + "'");
}

std::int64_t default_max_evals(SolverKind solver) {
  switch (solver) {
    case SolverKind::kAg:
      return 1'000'000;
    case SolverKind::kCag:
    case SolverKind::kNcg:
    case SolverKind::kLcg:
      return 500'000 * 2;
  }
  return 1'000'000;
}

void RunConfig::validate() const {
  problem.validate();
  if (!(gtol > 0.0)) throw InvalidSpec("gtol must be positive");
  if (max_evals && *max_evals <= 0) throw InvalidSpec("max_evals must be positive");
  if (L && !(*L > 0.0)) throw InvalidSpec("L must be positive");
  if (ell && *ell < 0.0) throw InvalidSpec("ell must be nonnegative");
}

RunOutcome run(const RunConfig& config) {
  config.validate();
  const auto problem = make_problem(config.problem);
  RunOutcome out;
  out.problem_name = problem->name();
  out.solver = config.solver;
  out.L = config.L.value_or(problem->default_L());
  out.ell = config.ell.value_or(problem->default_ell());
  out.gtol = config.gtol;
  if (out.ell > out.L) throw InvalidSpec("ell exceeds L");
  const std::int64_t budget = config.max_evals.value_or(default_max_evals(config.solver));
  const Vector x0(problem->dimension(), 0.0);

  const auto start = std::chrono::steady_clock::now();
  switch (config.solver) {
    case SolverKind::kCag: {
      CagConfig cfg;
      cfg.L = out.L;
      cfg.ell = out.ell;
      cfg.gtol = config.gtol;
      cfg.max_evals = budget;
      cfg.conjugate_z_mode = config.conjugate_z;
      out.result = cag_minimize(*problem, x0, cfg);
      break;
    }
    case SolverKind::kAg: {
      AgConfig cfg;
      cfg.L = out.L;
      cfg.ell = out.ell;
      cfg.gtol = config.gtol;
      cfg.max_evals = budget;
      out.result = ag_minimize(*problem, x0, cfg);
      break;
    }
    case SolverKind::kNcg: {
      NcgConfig cfg;
      cfg.L = out.L;
      cfg.gtol = config.gtol;
      cfg.max_evals = budget;
      out.result = ncg_minimize(*problem, x0, cfg);
      break;
    }
    case SolverKind::kLcg: {
      const auto* qp = dynamic_cast<const QuadraticProblem*>(problem.get());
      if (qp == nullptr) {
        throw InvalidSpec("lcg needs a quadratic problem, got " + problem->name());
      }
      LcgConfig cfg;
      cfg.gtol = config.gtol;
      cfg.max_iters = budget;
      out.result = lcg_minimize(*qp, x0, cfg);
      break;
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.trace_path.empty()) {
    std::ofstream file(config.trace_path);
    if (!file) throw std::runtime_error("cannot write trace file " + config.trace_path);
    write_trace_csv(file, out.result.trace);
  }
  if (!config.json_path.empty()) {
    std::ofstream file(config.json_path);
    if (!file) throw std::runtime_error("cannot write summary file " + config.json_path);
    file << summary_json(out) << "\n";
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "iter,evals,f,gnorm,phistar,step\n";
  for (const auto& r : trace) {
    out << r.iter << ',' << r.evals << ',' << g17(r.f) << ',' << g17(r.gnorm) << ','
        << g17(r.phi_star) << ',' << step_label(r.step) << '\n';
  }
}

std::string summary_json(const RunOutcome& outcome) {
  const auto& r = outcome.result;
  nlohmann::ordered_json j;
  j["problem"] = outcome.problem_name;
  j["solver"] = solver_label(outcome.solver);
  j["status"] = status_label(r.status);
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["f_final"] = r.f_final;
  j["gnorm_final"] = r.gnorm_final;
  j["gtol"] = outcome.gtol;
  j["L"] = outcome.L;
  j["ell"] = outcome.ell;
  j["wall_seconds"] = outcome.wall_seconds;
  j["ag_steps"] = count_steps(r.trace, StepKind::kAG);
  j["retry_steps"] = count_steps(r.trace, StepKind::kSteepestRetry);
  return j.dump(2);
}

std::vector<SummaryRow> run_suite(const std::vector<RunConfig>& configs, int parallelism) {
  std::vector<SummaryRow> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      SummaryRow& row = rows[i];
      row.solver = solver_label(configs[i].solver);
      try {
        const RunOutcome outcome = run(configs[i]);
        row.problem = outcome.problem_name;
        row.status = status_label(outcome.result.status);
        row.evaluations = outcome.result.evaluations;
        row.iterations = outcome.result.iterations;
        row.f_final = outcome.result.f_final;
        row.gnorm_final = outcome.result.gnorm_final;
        row.wall_seconds = outcome.wall_seconds;
      } catch (const std::exception& e) {
        row.problem = std::string(family_label(configs[i].problem.family)) +
                      "(n=" + std::to_string(configs[i].problem.n) + ")";
        row.status = "error";
        row.error = e.what();
      }
    }
  };
  const int threads = std::clamp(parallelism, 1, std::max(1, static_cast<int>(configs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].status != status_label(SolverStatus::kConverged)) continue;
    auto it = best.find(rows[i].problem);
    if (it == best.end() || rows[i].evaluations < rows[it->second].evaluations) {
      best[rows[i].problem] = i;
    }
  }
  for (const auto& [problem, index] : best) rows[index].best = true;
  return rows;
}

void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows) {
  std::size_t width = 7;
  for (const auto& r : rows) width = std::max(width, r.problem.size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "problem" << std::setw(8)
      << "solver" << std::setw(21) << "status" << std::right << std::setw(12) << "evals"
      << std::setw(12) << "iters" << std::setw(25) << "f_final" << std::setw(14) << "gnorm"
      << std::setw(10) << "wall_s" << "  best\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.problem << std::setw(8)
        << r.solver << std::setw(21) << r.status << std::right << std::setw(12) << r.evaluations
        << std::setw(12) << r.iterations << std::setw(25) << std::setprecision(16) << r.f_final
        << std::setw(14) << std::setprecision(4) << r.gnorm_final << std::setw(10)
        << std::fixed << std::setprecision(3) << r.wall_seconds << std::defaultfloat
        << (r.best ? "  *" : "");
    if (!r.error.empty()) out << "  " << r.error;
    out << "\n";
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "problem,solver,status,evaluations,iterations,f_final,gnorm_final,wall_seconds,best\n";
  for (const auto& r : rows) {
    out << '"' << r.problem << "\"," << r.solver << ',' << r.status << ',' << r.evaluations
        << ',' << r.iterations << ',' << g17(r.f_final) << ',' << g17(r.gnorm_final) << ','
        << g17(r.wall_seconds) << ',' << (r.best ? 1 : 0) << '\n';
  }
}

std::vector<RunConfig> parse_suite(std::string_view text) {
  static const std::set<std::string> kKnown = {
      "family", "n",     "m",         "lambda", "delta", "sigma", "tau",        "seed",
      "solver", "solvers", "gtol", "max_evals", "L",     "ell",   "conjugate_z"};
  std::vector<RunConfig> configs;
  for (const KeyValues& block : parse_key_value_blocks(text)) {
    for (const auto& [key, value] : block) {
      if (!kKnown.contains(key)) throw InvalidSpec("unknown suite key '" + key + "'");
    }
    RunConfig base;
    base.problem = problem_spec_from(block);
    if (auto it = block.find("gtol"); it != block.end()) base.gtol = parse_number("gtol", it->second);
    if (auto it = block.find("max_evals"); it != block.end()) {
      base.max_evals = static_cast<std::int64_t>(parse_number("max_evals", it->second));
    }
    if (auto it = block.find("L"); it != block.end()) base.L = parse_number("L", it->second);
    if (auto it = block.find("ell"); it != block.end()) base.ell = parse_number("ell", it->second);
    if (auto it = block.find("conjugate_z"); it != block.end()) {
      base.conjugate_z = parse_bool("conjugate_z", it->second);
    }
    std::string solvers;
    if (auto it = block.find("solvers"); it != block.end()) solvers = it->second;
    if (auto it = block.find("solver"); it != block.end()) {
      solvers += solvers.empty() ? it->second : "," + it->second;
    }
    if (solvers.empty()) throw InvalidSpec("suite block without 'solver' or 'solvers'");
    std::stringstream list(solvers);
    for (std::string item; std::getline(list, item, ',');) {
      RunConfig cfg = base;
      cfg.solver = parse_solver(trim_copy(item));
      cfg.validate();
      configs.push_back(std::move(cfg));
    }
  }
  return configs;
}

}  // namespace cag
