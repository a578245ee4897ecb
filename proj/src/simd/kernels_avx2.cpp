// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors
//
// AVX2/FMA backend. Complex doubles are interleaved (re, im); one 256-bit
// lane holds two complex values. This TU is the only one compiled with
// -mavx2 -mfma and its functions are reached only after the CPU check in
// avx2_usable().

#include "kernels_internal.hpp"

#if defined(RATEBAL_HAVE_AVX2)

#include <immintrin.h>

namespace ratebal::simd::detail {

namespace {

inline double hsum256(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void zaxpy_avx2(std::size_t n, cxd a, const cxd* x, cxd* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0x5);  // [xi, xr | xi, xr]
    const __m256d t = _mm256_mul_pd(xs, ai);
    // even lanes: xr*ar - xi*ai, odd lanes: xi*ar + xr*ai
    const __m256d prod = _mm256_fmaddsub_pd(xv, ar, t);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, prod));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cxd(y[i].real() + a.real() * xr - a.imag() * xi,
               y[i].imag() + a.real() * xi + a.imag() * xr);
  }
}

cxd zdotc_avx2(std::size_t n, const cxd* x, const cxd* y) {
  const auto* xd = reinterpret_cast<const double*>(x);
  const auto* yd = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const __m256d neg_even = _mm256_setr_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);  // xr*yr, xi*yi
    __m256d xs = _mm256_permute_pd(xv, 0x5);   // [xi, xr]
    xs = _mm256_xor_pd(xs, neg_even);          // [-xi, xr]
    acc_im = _mm256_fmadd_pd(xs, yv, acc_im);  // -xi*yr, xr*yi
  }
  double re = hsum256(acc_re);
  double im = hsum256(acc_im);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void daxpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double ddot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum256(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

bool avx2_usable() noexcept {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable avx2_table = {zaxpy_avx2, zdotc_avx2, daxpy_avx2,
                                ddot_avx2};

}  // namespace ratebal::simd::detail

#endif  // RATEBAL_HAVE_AVX2
