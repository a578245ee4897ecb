// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ratebal {

using cxd = std::complex<double>;

/// Error categories surfaced by the library. Every throwing path uses
/// Error with one of these codes so callers (and the Monte Carlo driver)
/// can distinguish configuration mistakes from numerical breakdowns.
enum class Errc {
  invalid_config,
  degenerate_power,
  infeasible_target,
  invalid_target,
  singular_system,
  degenerate_coupling,
  degenerate_shape,
  degenerate_receiver,
  numerical_failure,
  iteration_failure,
  experiment_failure,
  spec_error,
  io_error,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, int step = -1);

  Errc code() const noexcept { return code_; }
  /// Balancer sub-step (1-8) for iteration failures, -1 otherwise.
  int step() const noexcept { return step_; }

 private:
  Errc code_;
  int step_;
};

[[noreturn]] void fail(Errc code, const std::string& what, int step = -1);

}  // namespace ratebal
