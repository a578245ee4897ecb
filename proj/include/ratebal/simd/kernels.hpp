// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <cstddef>
#include <vector>

#include "ratebal/common.hpp"

namespace ratebal::simd {

/// Kernel backends. `scalar` is the portable reference; vector backends are
/// compiled in where the toolchain supports them and selected at runtime
/// from CPU features. All backends compute the same results up to rounding
/// (FMA contraction differs), which the equivalence tests pin down.
enum class Backend {
  scalar,
  avx2,
};

const char* backend_name(Backend b) noexcept;

/// Backend in use for subsequent kernel calls.
Backend active_backend() noexcept;

/// Backends compiled into this binary and runnable on this CPU.
std::vector<Backend> available_backends();

/// Override the dispatch choice (tests, benchmarking). Throws
/// Errc::spec_error if the backend is not available. Not thread-safe
/// against concurrent kernel calls; switch before spawning workers.
void force_backend(Backend b);

/// Reset to the automatic choice (CPU detection, RATEBAL_SIMD env var).
void reset_backend();

// Contiguous unit-stride kernels. These are the arithmetic inner loops of
// the matrix layer; n is tiny (stream/antenna counts) but the call volume
// across Monte Carlo trials is large.

/// y += a * x
void zaxpy(std::size_t n, cxd a, const cxd* x, cxd* y);

/// sum_i conj(x_i) * y_i
cxd zdotc(std::size_t n, const cxd* x, const cxd* y);

/// y += a * x
void daxpy(std::size_t n, double a, const double* x, double* y);

/// sum_i x_i * y_i
double ddot(std::size_t n, const double* x, const double* y);

}  // namespace ratebal::simd
