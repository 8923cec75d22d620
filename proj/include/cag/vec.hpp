#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <vector>

#include "cag/kernels.hpp"

namespace cag {

using Vector = std::vector<double>;

inline double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return kernels::active().dot(x.data(), y.data(), x.size());
}

inline double squared_norm(std::span<const double> x) { return dot(x, x); }

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// y <- a * x + y
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  kernels::active().axpy(a, x.data(), y.data(), x.size());
}

// y <- a * x + b * y
inline void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
  kernels::active().axpby(a, x.data(), b, y.data(), x.size());
}

// a * x + b * y as a fresh vector
inline Vector combine(double a, std::span<const double> x, double b,
                      std::span<const double> y) {
  assert(x.size() == y.size());
  Vector w(x.size());
  kernels::active().waxpby(a, x.data(), b, y.data(), w.data(), x.size());
  return w;
}

inline bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace cag
