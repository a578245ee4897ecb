// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <cstdint>
#include <vector>

#include "ratebal/cmat.hpp"
#include "ratebal/common.hpp"

namespace ratebal {

/// Static description of the downlink: a base station with M transmit
/// antennas serving K multi-antenna users under a sum power budget.
struct SystemConfig {
  int num_tx_antennas = 0;              ///< M
  int num_users = 0;                    ///< K
  std::vector<int> rx_antennas;         ///< N_k, one per user
  std::vector<int> streams;             ///< d_k, one per user
  double max_power = 1.0;               ///< P_max (linear units)
  double noise_variance = 1.0;          ///< sigma_n^2
  std::vector<double> rate_priorities;  ///< r_k^o, one per user

  int total_streams() const;      ///< N_d = sum d_k
  int total_rx_antennas() const;  ///< sum N_k

  /// Throws Errc::invalid_config when any structural invariant is violated
  /// (stream count above spatial dimensions, nonpositive powers, ...).
  void validate() const;
};

/// Stream/antenna bookkeeping derived from a config, shared by the duality
/// and balancing code: which user owns stream i and where each user's
/// streams and antenna rows start.
struct StreamLayout {
  explicit StreamLayout(const SystemConfig& c);

  int num_streams = 0;
  std::vector<int> user_of_stream;  ///< length N_d
  std::vector<int> stream_offset;   ///< length K+1 (prefix sums of d_k)
  std::vector<int> antenna_offset;  ///< length K+1 (prefix sums of N_k)
};

/// One channel realization. per_user[k] is H_k (N_k x M); stacked is the
/// row-concatenation H. Treat as immutable once generated.
struct ChannelSet {
  std::vector<CMat> per_user;
  CMat stacked;
};

ChannelSet make_channel_set(std::vector<CMat> per_user);

/// Structured model H_k^H = B_k * U * A_k with U = mu*diag(1, alpha, ...,
/// alpha^{N_k-1}) and mu normalizing the trace; alpha in (0, 1] controls the
/// per-user rank profile. Deterministic given the seed.
ChannelSet generate_structured_channel(const SystemConfig& config, double alpha,
                                       std::uint64_t seed);

/// Classical i.i.d. model H_k^H = B_k with CN(0,1) entries.
ChannelSet generate_iid_channel(const SystemConfig& config, std::uint64_t seed);

/// Exact user rates (nats) for a given transmit filter. tx_filter is the
/// M x N_d composite (beamformer times per-stream amplitude), partitioned
/// per user by the config's stream counts:
///   r_k = ln det(I + H_k Gc_k Gc_k^H H_k^H (s2 I + sum_{j!=k} ...)^{-1}).
std::vector<double> user_rates(const SystemConfig& config,
                               const ChannelSet& channel, const CMat& tx_filter,
                               double sigma2);

}  // namespace ratebal
