#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "cag/errors.hpp"
#include "cag/vec.hpp"

namespace cag {

// A smooth convex objective. f and its gradient are always produced
// together; one call is one function-gradient evaluation. Implementations
// are immutable after construction and may be shared across threads.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;

  // Writes the gradient into g (length dimension()) and returns f(x).
  virtual double evaluate(std::span<const double> x, std::span<double> g) const = 0;

  // Smoothness modulus L and strong-convexity modulus ell the family
  // guarantees; ell <= L.
  virtual double default_L() const = 0;
  virtual double default_ell() const = 0;
  virtual std::string name() const = 0;

  // Closed-form optimum, when the family has one. Used by tests only.
  virtual std::optional<Vector> known_minimizer() const { return std::nullopt; }
  virtual std::optional<double> known_min_value() const { return std::nullopt; }
};

class EvalCounter {
 public:
  std::int64_t count() const { return count_; }
  void tick() { ++count_; }

 private:
  std::int64_t count_ = 0;
};

struct Evaluation {
  double f = 0.0;
  Vector g;
};

// One counted evaluation. Throws NumericalFailure when x, f or any gradient
// entry is non-finite; the counter is still advanced in the latter case.
Evaluation evaluate_counted(const Objective& problem, std::span<const double> x,
                            EvalCounter& counter);

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. Not counted.
Vector finite_diff_gradient(const Objective& problem, std::span<const double> x, double h);

}  // namespace cag
