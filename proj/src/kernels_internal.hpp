#pragma once

#include "cag/kernels.hpp"

namespace cag::kernels {

#if defined(CAG_HAVE_AVX2_KERNELS)
const KernelTable* avx2_table();
#endif
#if defined(CAG_HAVE_NEON_KERNELS)
const KernelTable* neon_table();
#endif

}  // namespace cag::kernels
