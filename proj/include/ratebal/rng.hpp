// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <cstdint>
#include <random>

#include "ratebal/common.hpp"

namespace ratebal {

/// Seedable random source with a bit-portable output sequence.
///
/// mt19937_64 output is fixed by the standard, and the Gaussian samples are
/// produced by an explicit Box-Muller transform instead of the
/// implementation-defined std::normal_distribution, so channel realizations
/// are reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard real Gaussian, Box-Muller pair cached.
  double gaussian();

  /// Standard complex Gaussian CN(0,1): (x + iy)/sqrt(2), E|z|^2 = 1.
  /// Consumes exactly two uniforms, independent of gaussian() state.
  cxd complex_gaussian();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ratebal
