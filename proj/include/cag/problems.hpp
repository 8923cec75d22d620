#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cag/oracle.hpp"
#include "cag/quadratic.hpp"

namespace cag {

enum class Family { kQuadDiag, kAbpdn, kLogistic, kHuber };

std::string_view family_label(Family family);
Family parse_family(std::string_view text);  // throws InvalidSpec

// Declarative description of one benchmark instance. Unused parameters are
// ignored by the family that does not need them.
struct ProblemSpec {
  Family family = Family::kQuadDiag;
  std::int64_t n = 0;
  std::int64_t m = 0;       // logistic rows; 0 selects 2n
  double lambda = 0.0;      // abpdn penalty / logistic ridge
  double delta = 0.0;       // abpdn smoothing
  double sigma = 0.0;       // logistic noise level
  double tau = 0.0;         // huber cutoff
  std::uint64_t seed = 0;   // logistic only

  // Family defaults for every parameter the family uses.
  static ProblemSpec defaults(Family family, std::int64_t n);
  void validate() const;  // throws InvalidSpec

  bool operator==(const ProblemSpec&) const = default;
};

using KeyValues = std::map<std::string, std::string>;

// "key = value" lines; '#' starts a comment. Blank lines separate blocks.
std::vector<KeyValues> parse_key_value_blocks(std::string_view text);

// Keys: family, n, m, lambda, delta, sigma, tau, seed. Missing keys take the
// family defaults; unknown keys are left for the caller.
ProblemSpec problem_spec_from(const KeyValues& kv);
std::string to_config_text(const ProblemSpec& spec);

// f(x) = sum_i i^2 x_i^2 / 2 - sum_i sin(i) x_i, i = 1..n.
class QuadDiagProblem final : public QuadraticProblem {
 public:
  explicit QuadDiagProblem(std::size_t n);
  std::size_t dimension() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  std::span<const double> rhs() const override { return b_; }
  double default_L() const override;
  double default_ell() const override { return 1.0; }
  std::string name() const override;
  std::optional<Vector> known_minimizer() const override;
  std::optional<double> known_min_value() const override;

 private:
  std::size_t n_;
  Vector diag_;
  Vector b_;
};

// Smoothed basis pursuit denoising
//   ||A x - b||^2 / 2 + lambda sum_i sqrt(x_i^2 + delta)
// with A the rows of the orthonormal n x n DCT-II matrix whose 1-based
// indices are the first sqrt(n) primes, and b_i = sin(i^2).
class AbpdnProblem final : public Objective {
 public:
  AbpdnProblem(std::size_t n, double lambda, double delta);
  std::size_t dimension() const override { return n_; }
  double evaluate(std::span<const double> x, std::span<double> g) const override;
  double default_L() const override { return 1.0 + lambda_ / std::sqrt(delta_); }
  double default_ell() const override { return 0.0; }
  std::string name() const override;

  std::size_t rows() const { return m_; }
  std::span<const double> row(std::size_t i) const;
  std::span<const double> rhs() const { return b_; }
  Vector apply(std::span<const double> x) const;
  Vector apply_transpose(std::span<const double> y) const;

 private:
  std::size_t n_;
  std::size_t m_;
  double lambda_;
  double delta_;
  Vector a_;  // m x n row-major
  Vector b_;
};

// Regularized logistic loss sum_i l((A x)_i) + lambda ||x||^2 / 2 with
// l(v) = ln(1 + e^-v) and rows 1/sqrt(n) + N(0, sigma^2) noise.
class LogisticProblem final : public Objective {
 public:
  LogisticProblem(std::size_t m, std::size_t n, double lambda, double sigma, std::uint64_t seed);
  std::size_t dimension() const override { return n_; }
  double evaluate(std::span<const double> x, std::span<double> g) const override;
  double default_L() const override { return L_; }
  double default_ell() const override { return lambda_; }
  std::string name() const override;

  std::size_t rows() const { return m_; }
  std::span<const double> matrix() const { return a_; }
  Vector apply(std::span<const double> x) const;
  Vector apply_transpose(std::span<const double> y) const;

 private:
  std::size_t m_;
  std::size_t n_;
  double lambda_;
  double sigma_;
  std::uint64_t seed_;
  Vector a_;
  double L_ = 0.0;
};

// Huber regression sum_i zeta((A x)_i - b_i) with A the (n+1) x n
// bidiagonal difference matrix (1 on the diagonal, -1 below) and b = 1..n+1.
class HuberProblem final : public Objective {
 public:
  HuberProblem(std::size_t n, double tau);
  std::size_t dimension() const override { return n_; }
  double evaluate(std::span<const double> x, std::span<double> g) const override;
  double default_L() const override { return 8.0; }
  double default_ell() const override { return 0.0; }
  std::string name() const override;

 private:
  std::size_t n_;
  double tau_;
};

// ln(1 + e^-v) without overflow for large |v|.
double logistic_loss(double v);
// d/dv ln(1 + e^-v) = -1 / (1 + e^v).
double logistic_loss_derivative(double v);

double huber_zeta(double t, double tau);
double huber_zeta_derivative(double t, double tau);

std::shared_ptr<const QuadDiagProblem> make_quad_diag(std::int64_t n);
std::shared_ptr<const AbpdnProblem> make_abpdn(std::int64_t n, double lambda, double delta);
std::shared_ptr<const LogisticProblem> make_logistic(std::int64_t m, std::int64_t n,
                                                     double lambda, double sigma,
                                                     std::uint64_t seed);
std::shared_ptr<const HuberProblem> make_huber(std::int64_t n, double tau);
std::shared_ptr<const Objective> make_problem(const ProblemSpec& spec);

std::vector<std::int64_t> first_primes(std::int64_t m);

using LinearMap = std::function<Vector(std::span<const double>)>;

// Power iteration on A^T A from the normalized all-ones vector; returns the
// estimate of the largest singular value (0 for the zero operator).
double estimate_spectral_norm(const LinearMap& apply, const LinearMap& apply_t, std::size_t n,
                              int iters);

}  // namespace cag
