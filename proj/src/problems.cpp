#include "cag/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cag/errors.hpp"

namespace cag {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidSpec("'" + key + "' expects an integer, got '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw InvalidSpec("'" + key + "' expects a number, got '" + text + "'");
  }
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string format_short(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Uniform double in (0, 1] from the top 53 bits.
double unit_open_closed(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::string_view family_label(Family family) {
  switch (family) {
    case Family::kQuadDiag:
      return "quad";
    case Family::kAbpdn:
      return "abpdn";
    case Family::kLogistic:
      return "logistic";
    case Family::kHuber:
      return "huber";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "quad") return Family::kQuadDiag;
  if (text == "abpdn") return Family::kAbpdn;
  if (text == "logistic") return Family::kLogistic;
  if (text == "huber") return Family::kHuber;
  throw InvalidSpec("unknown problem family '" + std::string(text) + "'");
}

ProblemSpec ProblemSpec::defaults(Family family, std::int64_t n) {
  ProblemSpec spec;
  spec.family = family;
  spec.n = n;
  switch (family) {
    case Family::kQuadDiag:
      break;
    case Family::kAbpdn:
      spec.lambda = 1e-3;
      spec.delta = 1e-4;
      break;
    case Family::kLogistic:
      spec.m = 2 * n;
      spec.lambda = 1e-4;
      spec.sigma = 0.4;
      spec.seed = 1;
      break;
    case Family::kHuber:
      spec.tau = static_cast<double>(n) / 40.0;
      break;
  }
  return spec;
}

void ProblemSpec::validate() const {
  if (n < 1) throw InvalidSpec("n must be positive");
  switch (family) {
    case Family::kQuadDiag:
      break;
    case Family::kAbpdn: {
      const auto root = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (root * root != n) throw InvalidSpec("abpdn needs n to be a perfect square");
      if (!(lambda > 0.0) || !(delta > 0.0)) throw InvalidSpec("abpdn needs lambda, delta > 0");
      break;
    }
    case Family::kLogistic:
      if (m < 1) throw InvalidSpec("logistic needs m >= 1");
      if (lambda < 0.0) throw InvalidSpec("logistic needs lambda >= 0");
      if (!(sigma > 0.0)) throw InvalidSpec("logistic needs sigma > 0");
      break;
    case Family::kHuber:
      if (!(tau > 0.0)) throw InvalidSpec("huber needs tau > 0");
      break;
  }
}

std::vector<KeyValues> parse_key_value_blocks(std::string_view text) {
  std::vector<KeyValues> blocks;
  KeyValues current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw InvalidSpec("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) throw InvalidSpec("line " + std::to_string(line_no) + ": empty key");
    current[std::move(key)] = std::move(value);
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  return blocks;
}

ProblemSpec problem_spec_from(const KeyValues& kv) {
  const auto family_it = kv.find("family");
  if (family_it == kv.end()) throw InvalidSpec("missing 'family'");
  const auto n_it = kv.find("n");
  if (n_it == kv.end()) throw InvalidSpec("missing 'n'");
  ProblemSpec spec =
      ProblemSpec::defaults(parse_family(family_it->second), parse_int("n", n_it->second));
  if (auto it = kv.find("m"); it != kv.end()) spec.m = parse_int("m", it->second);
  if (auto it = kv.find("lambda"); it != kv.end()) spec.lambda = parse_real("lambda", it->second);
  if (auto it = kv.find("delta"); it != kv.end()) spec.delta = parse_real("delta", it->second);
  if (auto it = kv.find("sigma"); it != kv.end()) spec.sigma = parse_real("sigma", it->second);
  if (auto it = kv.find("tau"); it != kv.end()) spec.tau = parse_real("tau", it->second);
  if (auto it = kv.find("seed"); it != kv.end()) {
    const auto seed = parse_int("seed", it->second);
    if (seed < 0) throw InvalidSpec("seed must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  spec.validate();
  return spec;
}

std::string to_config_text(const ProblemSpec& spec) {
  std::ostringstream os;
  os << "family = " << family_label(spec.family) << "\n";
  os << "n = " << spec.n << "\n";
  switch (spec.family) {
    case Family::kQuadDiag:
      break;
    case Family::kAbpdn:
      os << "lambda = " << format_real(spec.lambda) << "\n";
      os << "delta = " << format_real(spec.delta) << "\n";
      break;
    case Family::kLogistic:
      os << "m = " << spec.m << "\n";
      os << "lambda = " << format_real(spec.lambda) << "\n";
      os << "sigma = " << format_real(spec.sigma) << "\n";
      os << "seed = " << spec.seed << "\n";
      break;
    case Family::kHuber:
      os << "tau = " << format_real(spec.tau) << "\n";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

QuadDiagProblem::QuadDiagProblem(std::size_t n) : n_(n), diag_(n), b_(n) {
  if (n == 0) throw InvalidSpec("quad needs n >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i + 1);
    diag_[i] = k * k;
    b_[i] = std::sin(k);
  }
}

void QuadDiagProblem::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) out[i] = diag_[i] * x[i];
}

double QuadDiagProblem::default_L() const { return diag_.back(); }

std::string QuadDiagProblem::name() const { return "quad(n=" + std::to_string(n_) + ")"; }

std::optional<Vector> QuadDiagProblem::known_minimizer() const {
  Vector x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = b_[i] / diag_[i];
  return x;
}

std::optional<double> QuadDiagProblem::known_min_value() const {
  double f = 0.0;
  for (std::size_t i = 0; i < n_; ++i) f -= 0.5 * b_[i] * b_[i] / diag_[i];
  return f;
}

// ---------------------------------------------------------------------------

AbpdnProblem::AbpdnProblem(std::size_t n, double lambda, double delta)
    : n_(n), lambda_(lambda), delta_(delta) {
  ProblemSpec spec = ProblemSpec::defaults(Family::kAbpdn, static_cast<std::int64_t>(n));
  spec.lambda = lambda;
  spec.delta = delta;
  spec.validate();
  m_ = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));

  const auto primes = first_primes(static_cast<std::int64_t>(m_));
  a_.resize(m_ * n_);
  const auto period = static_cast<std::int64_t>(4 * n_);
  const double c_first = std::sqrt(1.0 / static_cast<double>(n_));
  const double c_rest = std::sqrt(2.0 / static_cast<double>(n_));
  const double step = std::numbers::pi / (2.0 * static_cast<double>(n_));
  for (std::size_t r = 0; r < m_; ++r) {
    const std::int64_t freq = primes[r] - 1;  // 1-based row index k -> frequency k - 1
    const double c = freq == 0 ? c_first : c_rest;
    for (std::size_t j = 0; j < n_; ++j) {
      // cos(pi (2j+1) freq / 2n) with the integer phase reduced mod 4n.
      const std::int64_t phase = ((2 * static_cast<std::int64_t>(j) + 1) * freq) % period;
      a_[r * n_ + j] = c * std::cos(step * static_cast<double>(phase));
    }
  }
  b_.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    const double k = static_cast<double>(i + 1);
    b_[i] = std::sin(k * k);
  }
}

std::span<const double> AbpdnProblem::row(std::size_t i) const {
  return std::span<const double>(a_).subspan(i * n_, n_);
}

Vector AbpdnProblem::apply(std::span<const double> x) const {
  Vector y(m_);
  for (std::size_t i = 0; i < m_; ++i) y[i] = dot(row(i), x);
  return y;
}

Vector AbpdnProblem::apply_transpose(std::span<const double> y) const {
  Vector x(n_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) axpy(y[i], row(i), x);
  return x;
}

double AbpdnProblem::evaluate(std::span<const double> x, std::span<double> g) const {
  Vector r = apply(x);
  axpy(-1.0, b_, r);
  double f = 0.5 * squared_norm(r);
  double penalty = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    const double s = std::sqrt(x[j] * x[j] + delta_);
    penalty += s;
    g[j] = lambda_ * x[j] / s;
  }
  f += lambda_ * penalty;
  for (std::size_t i = 0; i < m_; ++i) axpy(r[i], row(i), g);
  return f;
}

std::string AbpdnProblem::name() const {
  return "abpdn(n=" + std::to_string(n_) + ",lambda=" + format_short(lambda_) +
         ",delta=" + format_short(delta_) + ")";
}

// ---------------------------------------------------------------------------

double logistic_loss(double v) { return std::max(-v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

double logistic_loss_derivative(double v) {
  if (v >= 0.0) {
    const double e = std::exp(-v);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(v));
}

LogisticProblem::LogisticProblem(std::size_t m, std::size_t n, double lambda, double sigma,
                                 std::uint64_t seed)
    : m_(m), n_(n), lambda_(lambda), sigma_(sigma), seed_(seed), a_(m * n) {
  ProblemSpec spec = ProblemSpec::defaults(Family::kLogistic, static_cast<std::int64_t>(n));
  spec.m = static_cast<std::int64_t>(m);
  spec.lambda = lambda;
  spec.sigma = sigma;
  spec.validate();

  // mt19937_64 output is fixed by the standard; the normal deviates come
  // from Box-Muller here because std::normal_distribution is not portable.
  std::mt19937_64 rng(seed);
  const double shift = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < a_.size(); k += 2) {
    const double u1 = unit_open_closed(rng);
    const double u2 = unit_open_closed(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    a_[k] = shift + sigma * radius * std::cos(angle);
    if (k + 1 < a_.size()) a_[k + 1] = shift + sigma * radius * std::sin(angle);
  }
  const double smax = estimate_spectral_norm([this](std::span<const double> x) { return apply(x); },
                                             [this](std::span<const double> y) {
                                               return apply_transpose(y);
                                             },
                                             n_, 30) *
                      1.01;
  L_ = smax * smax / 4.0 + lambda_;
}

Vector LogisticProblem::apply(std::span<const double> x) const {
  Vector y(m_);
  const std::span<const double> a(a_);
  for (std::size_t i = 0; i < m_; ++i) y[i] = dot(a.subspan(i * n_, n_), x);
  return y;
}

Vector LogisticProblem::apply_transpose(std::span<const double> y) const {
  Vector x(n_, 0.0);
  const std::span<const double> a(a_);
  for (std::size_t i = 0; i < m_; ++i) axpy(y[i], a.subspan(i * n_, n_), x);
  return x;
}

double LogisticProblem::evaluate(std::span<const double> x, std::span<double> g) const {
  const Vector v = apply(x);
  double f = 0.5 * lambda_ * squared_norm(x);
  std::fill(g.begin(), g.end(), 0.0);
  const std::span<const double> a(a_);
  for (std::size_t i = 0; i < m_; ++i) {
    f += logistic_loss(v[i]);
    axpy(logistic_loss_derivative(v[i]), a.subspan(i * n_, n_), g);
  }
  axpy(lambda_, x, g);
  return f;
}

std::string LogisticProblem::name() const {
  return "logistic(m=" + std::to_string(m_) + ",n=" + std::to_string(n_) +
         ",lambda=" + format_short(lambda_) + ",sigma=" + format_short(sigma_) +
         ",seed=" + std::to_string(seed_) + ")";
}

// ---------------------------------------------------------------------------

double huber_zeta(double t, double tau) {
  if (t <= -tau) return -tau * tau - 2.0 * tau * t;
  if (t >= tau) return -tau * tau + 2.0 * tau * t;
  return t * t;
}

double huber_zeta_derivative(double t, double tau) {
  if (t <= -tau) return -2.0 * tau;
  if (t >= tau) return 2.0 * tau;
  return 2.0 * t;
}

HuberProblem::HuberProblem(std::size_t n, double tau) : n_(n), tau_(tau) {
  if (n == 0) throw InvalidSpec("huber needs n >= 1");
  if (!(tau > 0.0)) throw InvalidSpec("huber needs tau > 0");
}

double HuberProblem::evaluate(std::span<const double> x, std::span<double> g) const {
  // Row i (0-based) of A x is x_i - x_{i-1}, with x_{-1} = x_n = 0.
  double f = 0.0;
  for (std::size_t i = 0; i <= n_; ++i) {
    const double ax = (i < n_ ? x[i] : 0.0) - (i > 0 ? x[i - 1] : 0.0);
    const double t = ax - static_cast<double>(i + 1);
    f += huber_zeta(t, tau_);
    const double slope = huber_zeta_derivative(t, tau_);
    // column j collects +slope_j - slope_{j+1}
    if (i < n_) g[i] = slope;
    if (i > 0) g[i - 1] -= slope;
  }
  return f;
}

std::string HuberProblem::name() const {
  return "huber(n=" + std::to_string(n_) + ",tau=" + format_short(tau_) + ")";
}

// ---------------------------------------------------------------------------

std::shared_ptr<const QuadDiagProblem> make_quad_diag(std::int64_t n) {
  if (n < 1) throw InvalidSpec("quad needs n >= 1");
  return std::make_shared<const QuadDiagProblem>(static_cast<std::size_t>(n));
}

std::shared_ptr<const AbpdnProblem> make_abpdn(std::int64_t n, double lambda, double delta) {
  if (n < 1) throw InvalidSpec("abpdn needs n >= 1");
  return std::make_shared<const AbpdnProblem>(static_cast<std::size_t>(n), lambda, delta);
}

std::shared_ptr<const LogisticProblem> make_logistic(std::int64_t m, std::int64_t n,
                                                     double lambda, double sigma,
                                                     std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidSpec("logistic needs m, n >= 1");
  return std::make_shared<const LogisticProblem>(static_cast<std::size_t>(m),
                                                 static_cast<std::size_t>(n), lambda, sigma, seed);
}

std::shared_ptr<const HuberProblem> make_huber(std::int64_t n, double tau) {
  if (n < 1) throw InvalidSpec("huber needs n >= 1");
  return std::make_shared<const HuberProblem>(static_cast<std::size_t>(n), tau);
}

std::shared_ptr<const Objective> make_problem(const ProblemSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::kQuadDiag:
      return make_quad_diag(spec.n);
    case Family::kAbpdn:
      return make_abpdn(spec.n, spec.lambda, spec.delta);
    case Family::kLogistic:
      return make_logistic(spec.m, spec.n, spec.lambda, spec.sigma, spec.seed);
    case Family::kHuber:
      return make_huber(spec.n, spec.tau);
  }
  throw InvalidSpec("unknown family");
}

std::vector<std::int64_t> first_primes(std::int64_t m) {
  if (m < 1) throw std::invalid_argument("first_primes: m must be positive");
  std::int64_t limit = 16;
  while (true) {
    std::vector<bool> composite(static_cast<std::size_t>(limit + 1), false);
    std::vector<std::int64_t> primes;
    for (std::int64_t i = 2; i <= limit; ++i) {
      if (composite[static_cast<std::size_t>(i)]) continue;
      primes.push_back(i);
      if (static_cast<std::int64_t>(primes.size()) == m) return primes;
      for (std::int64_t j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = true;
    }
    limit *= 2;
  }
}

double estimate_spectral_norm(const LinearMap& apply, const LinearMap& apply_t, std::size_t n,
                              int iters) {
  if (iters < 1) throw std::invalid_argument("estimate_spectral_norm: iters must be >= 1");
  if (n == 0) return 0.0;
  Vector u(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = apply_t(apply(u));
    const double w_norm = norm2(w);
    if (w_norm == 0.0) return 0.0;
    sigma = std::sqrt(w_norm);
    for (std::size_t i = 0; i < n; ++i) u[i] = w[i] / w_norm;
  }
  return sigma;
}

}  // namespace cag
