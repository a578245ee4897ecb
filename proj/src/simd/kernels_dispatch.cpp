// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace ratebal::simd {

namespace {

using detail::KernelTable;

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_table;
    case Backend::avx2:
#if defined(RATEBAL_HAVE_AVX2)
      if (detail::avx2_usable()) return &detail::avx2_table;
#endif
      return nullptr;
  }
  return nullptr;
}

Backend detect() {
  if (const char* env = std::getenv("RATEBAL_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && table_for(Backend::avx2))
      return Backend::avx2;
  }
  if (table_for(Backend::avx2)) return Backend::avx2;
  return Backend::scalar;
}

struct Dispatch {
  Backend backend;
  const KernelTable* table;
  Dispatch() : backend(detect()), table(table_for(backend)) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

const char* backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

Backend active_backend() noexcept { return dispatch().backend; }

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (table_for(Backend::avx2)) out.push_back(Backend::avx2);
  return out;
}

void force_backend(Backend b) {
  const KernelTable* t = table_for(b);
  if (t == nullptr)
    fail(Errc::spec_error, std::string("simd backend not available: ") +
                               backend_name(b));
  dispatch().backend = b;
  dispatch().table = t;
}

void reset_backend() {
  dispatch().backend = detect();
  dispatch().table = table_for(dispatch().backend);
}

void zaxpy(std::size_t n, cxd a, const cxd* x, cxd* y) {
  dispatch().table->zaxpy(n, a, x, y);
}

cxd zdotc(std::size_t n, const cxd* x, const cxd* y) {
  return dispatch().table->zdotc(n, x, y);
}

void daxpy(std::size_t n, double a, const double* x, double* y) {
  dispatch().table->daxpy(n, a, x, y);
}

double ddot(std::size_t n, const double* x, const double* y) {
  return dispatch().table->ddot(n, x, y);
}

}  // namespace ratebal::simd
