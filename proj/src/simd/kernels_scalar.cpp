// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "kernels_internal.hpp"

namespace ratebal::simd::detail {

namespace {

void zaxpy_scalar(std::size_t n, cxd a, const cxd* x, cxd* y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cxd(y[i].real() + ar * xr - ai * xi,
               y[i].imag() + ar * xi + ai * xr);
  }
}

cxd zdotc_scalar(std::size_t n, const cxd* x, const cxd* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void daxpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double ddot_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

const KernelTable scalar_table = {zaxpy_scalar, zdotc_scalar, daxpy_scalar,
                                  ddot_scalar};

}  // namespace ratebal::simd::detail
