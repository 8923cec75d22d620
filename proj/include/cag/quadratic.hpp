#pragma once

#include <optional>
#include <span>
#include <string>

#include "cag/oracle.hpp"

namespace cag {

// f(x) = x^T A x / 2 - b^T x with A symmetric positive definite. The
// operator itself is the oracle, so linear CG can work with A directly.
class QuadraticProblem : public Objective {
 public:
  // out <- A x
  virtual void apply(std::span<const double> x, std::span<double> out) const = 0;
  virtual std::span<const double> rhs() const = 0;

  double evaluate(std::span<const double> x, std::span<double> g) const override;
};

// Explicit dense SPD matrix, row-major. The caller supplies the extreme
// eigenvalues as the default L and ell.
class DenseQuadratic final : public QuadraticProblem {
 public:
  DenseQuadratic(std::size_t n, Vector matrix, Vector b, double L, double ell,
                 std::string name = "dense_quadratic");

  std::size_t dimension() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  std::span<const double> rhs() const override { return b_; }
  double default_L() const override { return L_; }
  double default_ell() const override { return ell_; }
  std::string name() const override { return name_; }

  std::span<const double> matrix() const { return a_; }

 private:
  std::size_t n_;
  Vector a_;
  Vector b_;
  double L_;
  double ell_;
  std::string name_;
};

}  // namespace cag
