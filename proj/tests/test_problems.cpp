#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cag/errors.hpp"
#include "cag/problems.hpp"
#include "support.hpp"

using namespace cag;

namespace {

// Orthonormal DCT-II matrix straight from its definition, row k = 0..n-1.
Eigen::MatrixXd dct_matrix(int n) {
  Eigen::MatrixXd C(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int j = 0; j < n; ++j) C(k, j) = s * std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * n));
  }
  return C;
}

std::vector<std::int64_t> sieve_primes(std::int64_t limit) {
  std::vector<bool> composite(static_cast<std::size_t>(limit + 1), false);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  return out;
}

std::vector<std::shared_ptr<const Objective>> one_of_each() {
  return {make_quad_diag(30), make_abpdn(64, 1e-3, 1e-4), make_logistic(40, 20, 1e-4, 0.4, 9),
          make_huber(30, 0.75)};
}

double value(const Objective& p, std::span<const double> x) {
  Vector g(p.dimension());
  return p.evaluate(x, g);
}

}  // namespace

TEST_CASE("quad diag closed forms") {
  auto q = make_quad_diag(1000);
  CHECK(q->default_L() == 1e6);
  CHECK(q->default_ell() == 1.0);
  Vector g(1000);
  CHECK(q->evaluate(Vector(1000, 0.0), g) == 0.0);
  for (int i = 1; i <= 1000; ++i) CHECK(g[static_cast<std::size_t>(i - 1)] == doctest::Approx(-std::sin(i)));
}

TEST_CASE("abpdn at zero") {
  const double lambda = 1e-3, delta = 1e-4;
  auto a = make_abpdn(256, lambda, delta);
  CHECK(a->rows() == 16);
  Vector g(256);
  const double f = a->evaluate(Vector(256, 0.0), g);
  double bb = 0.0;
  for (int i = 1; i <= 16; ++i) bb += std::sin(double(i) * i) * std::sin(double(i) * i);
  CHECK(f == doctest::Approx(0.5 * bb + lambda * 256 * std::sqrt(delta)));
  const Vector atb = a->apply_transpose(a->rhs());
  for (std::size_t j = 0; j < 256; ++j) CHECK(g[j] == doctest::Approx(-atb[j]).epsilon(1e-12));
  CHECK(a->default_L() == doctest::Approx(1.0 + lambda / std::sqrt(delta)));
}

TEST_CASE("abpdn needs a perfect square") {
  CHECK_THROWS_AS(make_abpdn(50, 1e-3, 1e-4), InvalidSpec);
}

TEST_CASE("abpdn rows are a contraction") {
  auto a = make_abpdn(1024, 1e-3, 1e-4);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const Vector x = testing::random_vector(1024, rng);
    CHECK(norm2(a->apply(x)) <= norm2(x) * (1 + 1e-12));
  }
}

TEST_CASE("logistic at zero") {
  auto l = make_logistic(30, 12, 1e-4, 0.4, 5);
  Vector g(12);
  CHECK(l->evaluate(Vector(12, 0.0), g) == doctest::Approx(30 * std::log(2.0)));
  const Vector half = l->apply_transpose(Vector(30, 0.5));
  for (std::size_t j = 0; j < 12; ++j) CHECK(g[j] == doctest::Approx(-half[j]).epsilon(1e-12));
  CHECK(l->default_ell() == 1e-4);
}

TEST_CASE("logistic matrix is deterministic and seed dependent") {
  auto a = make_logistic(20, 10, 1e-4, 0.4, 77);
  auto b = make_logistic(20, 10, 1e-4, 0.4, 77);
  auto c = make_logistic(20, 10, 1e-4, 0.4, 78);
  CHECK(std::equal(a->matrix().begin(), a->matrix().end(), b->matrix().begin()));
  CHECK_FALSE(std::equal(a->matrix().begin(), a->matrix().end(), c->matrix().begin()));
  CHECK(a->default_L() == b->default_L());
}

TEST_CASE("logistic L covers the curvature bound") {
  auto l = make_logistic(60, 30, 1e-4, 0.4, 1);
  Eigen::MatrixXd A(60, 30);
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 30; ++j) A(i, j) = l->matrix()[static_cast<std::size_t>(i * 30 + j)];
  const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
  CHECK(l->default_L() >= smax * smax / 4 + 1e-4);
  CHECK(l->default_L() <= 1.03 * 1.03 * smax * smax / 4 + 1e-4);
}

TEST_CASE("huber knots are C1") {
  const double tau = 1.7;
  CHECK(huber_zeta(tau, tau) == doctest::Approx(tau * tau));
  CHECK(-tau * tau + 2 * tau * tau == doctest::Approx(tau * tau));
  CHECK(huber_zeta_derivative(tau, tau) == doctest::Approx(2 * tau));
  CHECK(huber_zeta(2 * tau, tau) == doctest::Approx(3 * tau * tau));
  CHECK(huber_zeta(-2 * tau, tau) == doctest::Approx(3 * tau * tau));
  CHECK(huber_zeta_derivative(-5 * tau, tau) == doctest::Approx(-2 * tau));
}

TEST_CASE("first primes, small cases") {
  CHECK(first_primes(1) == std::vector<std::int64_t>{2});
  CHECK(first_primes(5) == std::vector<std::int64_t>{2, 3, 5, 7, 11});
}

TEST_CASE("spectral norm of 2I is exact after one iteration") {
  auto twice = [](std::span<const double> x) { return combine(2.0, x, 0.0, x); };
  CHECK(estimate_spectral_norm(twice, twice, 4, 1) == doctest::Approx(2.0).epsilon(1e-15));
  auto zero = [](std::span<const double> x) { return Vector(x.size(), 0.0); };
  CHECK(estimate_spectral_norm(zero, zero, 4, 5) == 0.0);
}

TEST_CASE("every family is convex along random segments") {
  std::mt19937_64 rng(13);
  for (const auto& p : one_of_each()) {
    CAPTURE(p->name());
    for (int t = 0; t < 100; ++t) {
      const Vector x = testing::random_vector(p->dimension(), rng, 3.0);
      const Vector y = testing::random_vector(p->dimension(), rng, 3.0);
      const double fx = value(*p, x), fy = value(*p, y);
      const double fm = value(*p, combine(0.5, x, 0.5, y));
      CHECK(fm <= 0.5 * (fx + fy) + 1e-9 * (1 + std::abs(fx) + std::abs(fy)));
    }
  }
}

TEST_CASE("every family has a correct analytic gradient") {
  std::mt19937_64 rng(19);
  for (const auto& p : one_of_each()) {
    CAPTURE(p->name());
    for (int t = 0; t < 10; ++t) {
      const Vector x = testing::random_vector(p->dimension(), rng);
      Vector g(p->dimension());
      p->evaluate(x, g);
      const Vector fd = finite_diff_gradient(*p, x, 1e-6);
      CHECK(norm2(combine(1.0, fd, -1.0, g)) <= 1e-5 * std::max(1.0, norm2(g)));
    }
  }
}

TEST_CASE("problem spec defaults and validation") {
  const auto s = ProblemSpec::defaults(Family::kLogistic, 100);
  CHECK(s.m == 200);
  CHECK(s.sigma == 0.4);
  CHECK_NOTHROW(s.validate());
  auto bad = ProblemSpec::defaults(Family::kHuber, 10);
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);
  CHECK_THROWS_AS(parse_family("rosenbrock"), InvalidSpec);
}

TEST_CASE("problem spec survives a config-text round trip") {
  for (auto family : {Family::kQuadDiag, Family::kAbpdn, Family::kLogistic, Family::kHuber}) {
    auto spec = ProblemSpec::defaults(family, family == Family::kAbpdn ? 64 : 12);
    spec.seed = family == Family::kLogistic ? 99 : spec.seed;
    const auto blocks = parse_key_value_blocks(to_config_text(spec));
    REQUIRE(blocks.size() == 1);
    CHECK(problem_spec_from(blocks[0]) == spec);
  }
}

TEST_CASE("key-value blocks") {
  const auto blocks = parse_key_value_blocks("# header\nfamily = quad\nn=10\n\n\nfamily = huber # trailing\n");
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].at("n") == "10");
  CHECK(blocks[1].at("family") == "huber");
  CHECK_THROWS_AS(parse_key_value_blocks("just words\n"), InvalidSpec);
}

TEST_SUITE("worked_examples") {
  TEST_CASE("quad diag minimizer is stationary") {
    auto q = make_quad_diag(20);
    Vector xs(20);
    for (int i = 1; i <= 20; ++i) xs[static_cast<std::size_t>(i - 1)] = std::sin(i) / (double(i) * i);
    CHECK(xs[0] == doctest::Approx(0.841471).epsilon(1e-6));
    Vector g(20);
    q->evaluate(xs, g);
    for (double gi : g) CHECK(std::abs(gi) <= 1e-15);
    CHECK(q->known_minimizer().value() == xs);
  }

  TEST_CASE("DCT rows at primes 2, 3, 5, 7 are orthonormal") {
    const Eigen::MatrixXd C = dct_matrix(16);
    CHECK((C * C.transpose() - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::MatrixXd A(4, 16);
    const int primes[] = {2, 3, 5, 7};
    for (int r = 0; r < 4; ++r) A.row(r) = C.row(primes[r] - 1);
    CHECK((A * A.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);

    auto a = make_abpdn(16, 1e-3, 1e-4);
    REQUIRE(a->rows() == 4);
    for (int r = 0; r < 4; ++r) {
      const auto row = a->row(static_cast<std::size_t>(r));
      for (int j = 0; j < 16; ++j) CHECK(row[static_cast<std::size_t>(j)] == doctest::Approx(A(r, j)).epsilon(1e-13));
    }
  }

  TEST_CASE("softplus does not overflow at -800") {
    // ln(1 + e^800) = 800 + ln(1 + e^-800); the correction is below 1e-300.
    CHECK(logistic_loss(-800.0) == 800.0);
    CHECK(logistic_loss(800.0) >= 0.0);
    CHECK(logistic_loss(800.0) < 1e-300);
    CHECK(logistic_loss_derivative(-800.0) == doctest::Approx(-1.0));
  }

  TEST_CASE("huber n=3 by brute force") {
    const double tau = 2.5;
    Eigen::MatrixXd A(4, 3);
    A << 1, 0, 0, -1, 1, 0, 0, -1, 1, 0, 0, -1;
    const Eigen::Vector4d b(1, 2, 3, 4);
    auto zeta = [&](double t) { return t <= -tau ? -tau * tau - 2 * tau * t : t >= tau ? -tau * tau + 2 * tau * t : t * t; };
    auto dzeta = [&](double t) { return t <= -tau ? -2 * tau : t >= tau ? 2 * tau : 2 * t; };

    for (const Eigen::Vector3d x : {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0.5, -1.0, 4.0)}) {
      const Eigen::Vector4d r = A * x - b;
      double f = 0.0;
      Eigen::Vector4d d;
      for (int i = 0; i < 4; ++i) {
        f += zeta(r(i));
        d(i) = dzeta(r(i));
      }
      const Eigen::Vector3d want = A.transpose() * d;

      auto h = make_huber(3, tau);
      Vector g(3);
      CHECK(h->evaluate(testing::from_eigen(x), g) == doctest::Approx(f).epsilon(1e-15));
      for (int j = 0; j < 3; ++j) CHECK(g[static_cast<std::size_t>(j)] == doctest::Approx(want(j)).epsilon(1e-15));
    }
  }

  TEST_CASE("first 256 primes end at 1619") {
    const auto want = sieve_primes(2000);
    const auto got = first_primes(256);
    REQUIRE(got.size() == 256);
    CHECK(std::equal(got.begin(), got.end(), want.begin()));
    CHECK(want[255] == 1619);
    CHECK(got.back() == 1619);
  }

  TEST_CASE("power iteration on diag(1, 3)") {
    // From (1,1)/sqrt2 the iterate after k steps is proportional to
    // (1, 9^k); its Rayleigh estimate converges to 3 like 9^-k.
    auto d = [](std::span<const double> x) { return Vector{x[0], 3 * x[1]}; };
    const double got = estimate_spectral_norm(d, d, 2, 30);
    CHECK(std::abs(got - 3.0) <= 1e-6);
  }

  TEST_CASE("power iteration on the DCT rows gives one") {
    auto a = make_abpdn(1024, 1e-3, 1e-4);
    const double got = estimate_spectral_norm([&](std::span<const double> x) { return a->apply(x); },
                                              [&](std::span<const double> y) { return a->apply_transpose(y); },
                                              1024, 30);
    CHECK(std::abs(got - 1.0) <= 1e-6);
  }

  TEST_CASE("abpdn default L satisfies the smoothness inequality") {
    auto a = make_abpdn(256, 1e-3, 1e-4);
    const double L = a->default_L();
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> scale(-4.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
      const Vector x = testing::random_vector(256, rng, std::pow(10.0, scale(rng)));
      const Vector y = testing::random_vector(256, rng, std::pow(10.0, scale(rng)));
      Vector gx(256), gy(256);
      const double fx = a->evaluate(x, gx);
      const double fy = a->evaluate(y, gy);
      const Vector d = combine(1.0, y, -1.0, x);
      CHECK(fy - fx - dot(gx, d) <= 0.5 * L * squared_norm(d) + 1e-12 * (1 + std::abs(fx)));
    }
  }
}
