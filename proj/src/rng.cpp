// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/rng.hpp"

#include <cmath>

namespace ratebal {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  have_spare_ = true;
  spare_ = r * std::sin(kTwoPi * u2);
  return r * std::cos(kTwoPi * u2);
}

cxd Rng::complex_gaussian() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  // radius of the (x, y) pair divided by sqrt(2) gives unit variance
  const double r = std::sqrt(-std::log(u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

}  // namespace ratebal
