#include "cag/oracle.hpp"

#include <stdexcept>

namespace cag {

Evaluation evaluate_counted(const Objective& problem, std::span<const double> x,
                            EvalCounter& counter) {
  if (x.size() != problem.dimension()) {
    throw std::invalid_argument("evaluate_counted: point has wrong dimension");
  }
  if (!all_finite(x)) {
    throw NumericalFailure("evaluate_counted: non-finite point passed to " + problem.name());
  }
  Evaluation out;
  out.g.assign(x.size(), 0.0);
  out.f = problem.evaluate(x, out.g);
  counter.tick();
  if (!std::isfinite(out.f) || !all_finite(out.g)) {
    throw NumericalFailure("non-finite objective or gradient from " + problem.name());
  }
  return out;
}

Vector finite_diff_gradient(const Objective& problem, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be positive");
  const std::size_t n = problem.dimension();
  Vector probe(x.begin(), x.end());
  Vector scratch(n);
  Vector grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double f_plus = problem.evaluate(probe, scratch);
    probe[i] = saved - h;
    const double f_minus = problem.evaluate(probe, scratch);
    probe[i] = saved;
    grad[i] = (f_plus - f_minus) / (2.0 * h);
  }
  return grad;
}

}  // namespace cag
