#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cag/kernels.hpp"
#include "kernels_internal.hpp"

namespace cag::kernels {
namespace {

const KernelTable* compiled_table(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return &scalar_table();
    case Backend::kAvx2:
#if defined(CAG_HAVE_AVX2_KERNELS)
      return avx2_table();
#else
      return nullptr;
#endif
    case Backend::kNeon:
#if defined(CAG_HAVE_NEON_KERNELS)
      return neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(CAG_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
      // NEON is mandatory on AArch64.
      return compiled_table(Backend::kNeon) != nullptr;
  }
  return false;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("CAG_KERNELS")) {
    if (auto requested = parse_backend(env); requested && available(*requested)) {
      return compiled_table(*requested);
    }
  }
  return compiled_table(best_available());
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

bool available(Backend backend) {
  return compiled_table(backend) != nullptr && cpu_supports(backend);
}

Backend best_available() {
  if (available(Backend::kAvx2)) return Backend::kAvx2;
  if (available(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

const KernelTable& table(Backend backend) {
  if (!available(backend)) {
    throw std::invalid_argument("kernel backend '" + std::string(name(backend)) +
                                "' is not available on this machine");
  }
  return *compiled_table(backend);
}

const KernelTable& active() {
  const KernelTable* current = g_active.load(std::memory_order_acquire);
  if (current == nullptr) {
    const KernelTable* fresh = initial_table();
    if (g_active.compare_exchange_strong(current, fresh, std::memory_order_acq_rel)) {
      current = fresh;
    }
  }
  return *current;
}

void select(Backend backend) { g_active.store(&table(backend), std::memory_order_release); }

std::string_view name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view text) {
  if (text == "scalar") return Backend::kScalar;
  if (text == "avx2") return Backend::kAvx2;
  if (text == "neon") return Backend::kNeon;
  return std::nullopt;
}

}  // namespace cag::kernels
