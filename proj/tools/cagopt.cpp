// Command-line front end: `cagopt run ...` for a single solve, `cagopt suite`
// for a batch described by a key-value config file.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cag/errors.hpp"
#include "cag/harness.hpp"
#include "cag/kernels.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conjugate-plus-accelerated-gradient solvers and benchmark problems"};
  app.require_subcommand(1);

  std::string kernels;
  app.add_option("--kernels", kernels, "Vector kernel backend (scalar, avx2, neon)");

  // run
  auto* run_cmd = app.add_subcommand("run", "Solve one problem instance");
  std::string family;
  std::int64_t n = 0;
  std::optional<std::int64_t> m;
  std::optional<double> lambda, delta, sigma, tau, L, ell;
  std::optional<std::uint64_t> seed;
  std::string solver;
  double gtol = 1e-8;
  std::optional<std::int64_t> max_evals;
  bool conjugate_z = false;
  std::string trace_path, json_path;
  run_cmd->add_option("--family", family, "Problem family")
      ->required()
      ->check(CLI::IsMember({"quad", "abpdn", "logistic", "huber"}));
  run_cmd->add_option("--n", n, "Dimension")->required();
  run_cmd->add_option("--m", m, "Logistic rows (default 2n)");
  run_cmd->add_option("--lambda", lambda, "ABPDN penalty / logistic ridge weight");
  run_cmd->add_option("--delta", delta, "ABPDN smoothing");
  run_cmd->add_option("--sigma", sigma, "Logistic noise level");
  run_cmd->add_option("--tau", tau, "Huber cutoff");
  run_cmd->add_option("--seed", seed, "Logistic seed");
  run_cmd->add_option("--solver", solver, "Solver")
      ->required()
      ->check(CLI::IsMember({"cag", "ag", "ncg", "lcg"}));
  run_cmd->add_option("--gtol", gtol, "Stop when ||grad f||_2 <= gtol")->capture_default_str();
  run_cmd->add_option("--max-evals", max_evals, "Evaluation budget");
  run_cmd->add_option("--L", L, "Override the smoothness modulus");
  run_cmd->add_option("--ell", ell, "Override the strong-convexity modulus");
  run_cmd->add_flag("--conjugate-z", conjugate_z, "Use the conjugate-z bar iterate after AG blocks");
  run_cmd->add_option("--trace", trace_path, "Write the per-iteration trace CSV here");
  run_cmd->add_option("--json", json_path, "Write the run summary JSON here");

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "Run a batch of solves from a config file");
  std::string config_path, out_path;
  int parallel = 1;
  suite_cmd->add_option("--config", config_path, "Suite config file")->required();
  suite_cmd->add_option("--parallel", parallel, "Concurrent runs")->capture_default_str();
  suite_cmd->add_option("--out", out_path, "Write the summary table as CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernels.empty()) {
      const auto backend = cag::kernels::parse_backend(kernels);
      if (!backend) throw cag::InvalidSpec("unknown kernel backend '" + kernels + "'");
      cag::kernels::select(*backend);
    }

    if (*run_cmd) {
      cag::RunConfig config;
      config.problem = cag::ProblemSpec::defaults(cag::parse_family(family), n);
      if (m) config.problem.m = *m;
      if (lambda) config.problem.lambda = *lambda;
      if (delta) config.problem.delta = *delta;
      if (sigma) config.problem.sigma = *sigma;
      if (tau) config.problem.tau = *tau;
      if (seed) config.problem.seed = *seed;
      config.solver = cag::parse_solver(solver);
      config.gtol = gtol;
      config.max_evals = max_evals;
      config.L = L;
      config.ell = ell;
      config.conjugate_z = conjugate_z;
      config.trace_path = trace_path;
      config.json_path = json_path;
      const cag::RunOutcome outcome = cag::run(config);
      std::cout << cag::summary_json(outcome) << "\n";
      return outcome.result.status == cag::SolverStatus::kConverged ? 0 : 2;
    }

    const auto configs = cag::parse_suite(read_file(config_path));
    const auto rows = cag::run_suite(configs, parallel);
    cag::write_summary_text(std::cout, rows);
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      cag::write_summary_csv(out, rows);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
