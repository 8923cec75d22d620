#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "cag/quadratic.hpp"
#include "cag/vec.hpp"

namespace cag::testing {

inline Eigen::VectorXd to_eigen(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

inline Vector from_eigen(const Eigen::VectorXd& x) { return Vector(x.data(), x.data() + x.size()); }

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

struct SpdInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::shared_ptr<DenseQuadratic> problem;
};

// Q diag(eigs) Q^T with Q from the QR factorization of a Gaussian matrix.
// Eigenvalues are log-uniform on [lo, hi]; the extremes are pinned so that
// L and ell are exact.
inline SpdInstance random_spd(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd G(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) G(i, j) = normal(rng);
  Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();

  Eigen::VectorXd eig(N);
  for (Eigen::Index i = 0; i < N; ++i) eig(i) = lo * std::pow(hi / lo, unit(rng));
  eig(0) = lo;
  if (N > 1) eig(N - 1) = hi;

  SpdInstance out;
  out.A = Q * eig.asDiagonal() * Q.transpose();
  out.A = 0.5 * (out.A + out.A.transpose());
  out.b = Eigen::VectorXd(N);
  for (Eigen::Index i = 0; i < N; ++i) out.b(i) = normal(rng);
  out.lambda_min = eig.minCoeff();
  out.lambda_max = eig.maxCoeff();

  Vector a(n * n);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) a[static_cast<std::size_t>(i * N + j)] = out.A(i, j);
  out.problem = std::make_shared<DenseQuadratic>(n, std::move(a), from_eigen(out.b),
                                                 out.lambda_max, out.lambda_min);
  return out;
}

// Exact-line-search CG written straight from the textbook recurrences.
// Returns x_0 .. x_iters.
inline std::vector<Eigen::VectorXd> textbook_cg(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                Eigen::VectorXd x, int iters) {
  std::vector<Eigen::VectorXd> xs{x};
  Eigen::VectorXd r = b - A * x;
  Eigen::VectorXd p = r;
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd Ap = A * p;
    const double rr = r.dot(r);
    const double alpha = rr / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    p = r + (r.dot(r) / rr) * p;
    xs.push_back(x);
  }
  return xs;
}

inline double quad_value(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(A * x) - b.dot(x);
}

}  // namespace cag::testing
