#include "cag/kernels.hpp"

namespace cag::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void waxpby_scalar(double a, const double* x, double b, const double* y, double* w,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] = a * x[i] + b * y[i];
}

constexpr KernelTable kScalarTable{Backend::kScalar, dot_scalar, axpy_scalar,
                                   axpby_scalar, waxpby_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

}  // namespace cag::kernels
