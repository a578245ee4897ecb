// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <vector>

#include "ratebal/cmat.hpp"
#include "ratebal/system_model.hpp"

namespace ratebal {

/// Transceiver pair in the normalized-filter parameterization: the downlink
/// transmit beamformer G and per-user receive blocks F_k carry unit-norm
/// columns; all power bookkeeping is in the per-stream scalings beta and the
/// downlink/uplink power vectors p and q. F is block-diagonal by
/// construction (stream i of user k only touches user k's antenna rows).
struct TransceiverState {
  CMat tx_beamformer;           ///< G: M x N_d, unit-norm columns
  std::vector<CMat> rx_blocks;  ///< F_k: N_k x d_k, unit-norm columns
  std::vector<double> beta;     ///< per-stream scaling, length N_d
  std::vector<double> dl_power; ///< p, length N_d
  std::vector<double> ul_power; ///< q, length N_d
};

/// Per-stream mean squared errors, length N_d.
using StreamMse = std::vector<double>;

/// Stream coupling terms shared by the uplink and downlink power mappings:
/// d_i collects the direct-gain part of stream i's MSE, psi(i,j) the
/// crosstalk power |f_j^H H g_i|^2 (zero diagonal).
struct DualityCouplings {
  std::vector<double> d;
  RMat psi;
};

/// Checks unit norms, block shapes, and power budgets; throws
/// Errc::invalid_config on violation. Intended for tests and entry points,
/// not the iteration hot path.
void validate_state(const TransceiverState& state, const SystemConfig& config);

/// Cross-gain matrix C = F^H H G (N_d x N_d): C(i,j) = f_i^H H g_j with f_i
/// the zero-padded receive vector of stream i. Everything in the duality
/// layer is a function of C, beta, and the powers.
CMat cross_gains(const TransceiverState& state, const ChannelSet& channel,
                 const StreamLayout& layout);

/// Downlink per-stream MSEs. Streams with zero power require beta = 0
/// (their MSE is 1); zero power with nonzero beta is Errc::degenerate_power.
StreamMse dl_stream_mse(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2);

/// Uplink mirror of dl_stream_mse (roles of f and g swapped, q for p).
StreamMse ul_stream_mse(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2);

DualityCouplings duality_couplings(const TransceiverState& state,
                                   const ChannelSet& channel,
                                   const StreamLayout& layout);

// Variants on a precomputed cross-gain matrix; the balancer shares one C
// evaluation across the MSE and coupling computations of a sub-step.
StreamMse dl_stream_mse_from_gains(const CMat& gains,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& p, double sigma2);
StreamMse ul_stream_mse_from_gains(const CMat& gains,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& q, double sigma2);
DualityCouplings couplings_from_gains(const CMat& gains,
                                      const std::vector<double>& beta);

/// Downlink powers reproducing the target per-stream MSEs:
///   p = s2 (diag(eps) - diag(d) - diag(beta^2) Psi^T)^{-1} beta^2 1.
/// Streams with beta = 0 are excluded from the system and get p = 0.
/// Throws Errc::infeasible_target if any solved power is nonpositive and
/// Errc::singular_system if the coupling system cannot be solved.
std::vector<double> dl_power_from_mse(const StreamMse& target,
                                      const DualityCouplings& couplings,
                                      const std::vector<double>& beta,
                                      double sigma2);

/// Uplink mirror with Psi in place of Psi^T.
std::vector<double> ul_power_from_mse(const StreamMse& target,
                                      const DualityCouplings& couplings,
                                      const std::vector<double>& beta,
                                      double sigma2);

struct UlReceiverResult {
  CMat g;                    ///< updated transmit beamformer (UL receiver)
  std::vector<double> beta;  ///< per-stream scalings
};

/// Uplink MMSE receiver: g_i beta_i / sqrt(q_i) solves the regularized
/// normal equations against the uplink covariance H^H F Q F^H H + s2 I.
/// Throws Errc::degenerate_receiver when a raw receive vector vanishes.
UlReceiverResult ul_mmse_receiver(const ChannelSet& channel,
                                  const StreamLayout& layout,
                                  const std::vector<CMat>& rx_blocks,
                                  const std::vector<double>& q, double sigma2);

struct DlReceiverResult {
  std::vector<CMat> rx_blocks;  ///< updated per-user receive blocks
  std::vector<double> beta;
};

/// Downlink MMSE receiver per user against H_k G P G^H H_k^H + s2 I.
DlReceiverResult dl_mmse_receiver(const ChannelSet& channel,
                                  const StreamLayout& layout, const CMat& g,
                                  const std::vector<double>& p, double sigma2);

/// User k's downlink MSE matrix (d_k x d_k, Hermitian positive definite),
/// with the interference received through user k's own channel.
CMat dl_user_mse_matrix(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2, int user);

/// Uplink mirror: error covariance of user k's streams at the base station.
CMat ul_user_mse_matrix(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2, int user);

}  // namespace ratebal
