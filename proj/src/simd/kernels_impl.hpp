#pragma once

#include "psys/simd.hpp"

namespace psys::simd::detail {

extern const KernelTable kScalarTable;
#if defined(PSYS_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Table;
#endif

}  // namespace psys::simd::detail
