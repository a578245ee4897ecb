// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/common.hpp"

namespace ratebal {

const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::invalid_config: return "invalid_config";
    case Errc::degenerate_power: return "degenerate_power";
    case Errc::infeasible_target: return "infeasible_target";
    case Errc::invalid_target: return "invalid_target";
    case Errc::singular_system: return "singular_system";
    case Errc::degenerate_coupling: return "degenerate_coupling";
    case Errc::degenerate_shape: return "degenerate_shape";
    case Errc::degenerate_receiver: return "degenerate_receiver";
    case Errc::numerical_failure: return "numerical_failure";
    case Errc::iteration_failure: return "iteration_failure";
    case Errc::experiment_failure: return "experiment_failure";
    case Errc::spec_error: return "spec_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what, int step)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what),
      code_(code),
      step_(step) {}

void fail(Errc code, const std::string& what, int step) {
  throw Error(code, what, step);
}

}  // namespace ratebal
