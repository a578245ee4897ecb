// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <vector>

#include "ratebal/wmse.hpp"

namespace ratebal {

struct BalancerParams {
  int n_max = 20;           ///< inner iteration cap per outer round
  int m_max = 100;          ///< outer iteration cap
  double inner_tol = 1e-6;  ///< relative change of the balanced level
  double outer_tol = 1e-4;  ///< |t - 1| at the outer stop
};

void validate_params(const BalancerParams& p);

struct InitResult {
  TransceiverState state;
  WeightState weights;
};

/// Start-up of the double loop: selection receive filters F_k^H = (I : 0),
/// uniform uplink stream powers P_max/N_d, MMSE uplink receiver, identity
/// weights with targets xi_k = d_k, and a first balanced power split.
InitResult initialize(const SystemConfig& config, const ChannelSet& channel,
                      const BalancerParams& params);

struct InnerResult {
  double delta = 0.0;  ///< balanced level after the power reallocation
  StreamMse ul_mse;
  StreamMse dl_mse;
};

/// One inner sweep: uplink receiver + MSEs, downlink powers by duality,
/// downlink receiver + MSEs, uplink powers by duality, per-user shape
/// renormalization, and the balanced user power split from the Perron
/// eigenproblem. Throws Errc::iteration_failure carrying the sub-step
/// index (1-8) when a stage degenerates.
InnerResult inner_iteration(TransceiverState& state, const WeightState& weights,
                            const SystemConfig& config, const ChannelSet& channel,
                            const StreamLayout& layout);

/// Outer update: W_k = (E_k^UL)^{-1}, rates r_k = ln det W_k, scale
/// t = min_k r_k / target_k, targets and xi refreshed. Returns the rates.
std::vector<double> outer_update(WeightState& weights,
                                 const std::vector<CMat>& ul_mse_matrices,
                                 const SystemConfig& config);

struct BalancerReport {
  std::vector<double> rates;       ///< final user rates (nats), direct evaluation
  double balanced_level = 0.0;     ///< last inner balanced level
  std::vector<double> t_trace;     ///< scale factor per outer iteration
  std::vector<std::vector<double>> rate_trace;     ///< ln det W_k per outer
  std::vector<std::vector<double>> rate_trace_dl;  ///< direct rates per outer
  std::vector<std::vector<double>> delta_trace;    ///< inner levels per outer
  std::vector<int> inner_iterations_used;
  int outer_iterations = 0;
  bool converged = false;
  TransceiverState final_state;
  WeightState final_weights;
};

/// The full double-loop rate balancer. Deterministic given its inputs.
/// n_max = 1 selects the single-loop variant.
BalancerReport balance_rates(const SystemConfig& config, const ChannelSet& channel,
                             const BalancerParams& params);

/// Baseline: user MSE balancing with fixed identity weights and
/// xi_k = d_k (no outer update). The loop budget is n_max * m_max inner
/// sweeps with the same level-change stop.
BalancerReport balance_mse_unweighted(const SystemConfig& config,
                                      const ChannelSet& channel,
                                      const BalancerParams& params);

}  // namespace ratebal
