// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <cstddef>

#include "ratebal/common.hpp"

namespace ratebal::simd::detail {

struct KernelTable {
  void (*zaxpy)(std::size_t, cxd, const cxd*, cxd*);
  cxd (*zdotc)(std::size_t, const cxd*, const cxd*);
  void (*daxpy)(std::size_t, double, const double*, double*);
  double (*ddot)(std::size_t, const double*, const double*);
};

extern const KernelTable scalar_table;

#if defined(RATEBAL_HAVE_AVX2)
extern const KernelTable avx2_table;
bool avx2_usable() noexcept;
#endif

}  // namespace ratebal::simd::detail
