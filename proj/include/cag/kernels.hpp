#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

// Dense double-precision vector kernels used by every solver and problem
// evaluator. Each backend is a table of plain function pointers; the scalar
// table is the reference that the SIMD tables are tested against.
//
// Backends agree with the scalar reference up to reassociation of the
// dot-product sum and FMA contraction, so results are close but not
// bit-identical across backends. Within one process the active backend is
// fixed once selected, which keeps every run deterministic.

namespace cag::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y <- a * x + y
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y <- a * x + b * y
  void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
  // w <- a * x + b * y
  void (*waxpby)(double a, const double* x, double b, const double* y, double* w,
                 std::size_t n);
};

const KernelTable& scalar_table();

// True when the backend is compiled in and the running CPU supports it.
bool available(Backend backend);
Backend best_available();

// Throws std::invalid_argument when the backend is unavailable.
const KernelTable& table(Backend backend);

// The process-wide active table. On first use it is taken from the
// CAG_KERNELS environment variable ("scalar", "avx2", "neon") when set and
// available, otherwise from best_available().
const KernelTable& active();
void select(Backend backend);

std::string_view name(Backend backend);
std::optional<Backend> parse_backend(std::string_view text);

}  // namespace cag::kernels
