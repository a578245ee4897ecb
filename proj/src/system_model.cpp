// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/system_model.hpp"

#include <cmath>
#include <numeric>

#include "ratebal/rng.hpp"

namespace ratebal {

int SystemConfig::total_streams() const {
  return std::accumulate(streams.begin(), streams.end(), 0);
}

int SystemConfig::total_rx_antennas() const {
  return std::accumulate(rx_antennas.begin(), rx_antennas.end(), 0);
}

void SystemConfig::validate() const {
  if (num_tx_antennas < 1) fail(Errc::invalid_config, "num_tx_antennas < 1");
  if (num_users < 1) fail(Errc::invalid_config, "num_users < 1");
  if (int(rx_antennas.size()) != num_users)
    fail(Errc::invalid_config, "rx_antennas size != num_users");
  if (int(streams.size()) != num_users)
    fail(Errc::invalid_config, "streams size != num_users");
  if (int(rate_priorities.size()) != num_users)
    fail(Errc::invalid_config, "rate_priorities size != num_users");
  for (int k = 0; k < num_users; ++k) {
    if (rx_antennas[k] < 1) fail(Errc::invalid_config, "rx_antennas < 1");
    if (streams[k] < 1) fail(Errc::invalid_config, "streams < 1");
    if (streams[k] > std::min(rx_antennas[k], num_tx_antennas))
      fail(Errc::invalid_config, "stream count exceeds spatial dimensions");
    if (!(rate_priorities[k] > 0.0))
      fail(Errc::invalid_config, "rate priority must be positive");
  }
  if (!(max_power > 0.0)) fail(Errc::invalid_config, "max_power must be > 0");
  if (!(noise_variance > 0.0))
    fail(Errc::invalid_config, "noise_variance must be > 0");
}

StreamLayout::StreamLayout(const SystemConfig& c) {
  num_streams = c.total_streams();
  stream_offset.assign(size_t(c.num_users) + 1, 0);
  antenna_offset.assign(size_t(c.num_users) + 1, 0);
  for (int k = 0; k < c.num_users; ++k) {
    stream_offset[size_t(k) + 1] = stream_offset[size_t(k)] + c.streams[size_t(k)];
    antenna_offset[size_t(k) + 1] =
        antenna_offset[size_t(k)] + c.rx_antennas[size_t(k)];
    for (int s = 0; s < c.streams[size_t(k)]; ++s) user_of_stream.push_back(k);
  }
}

ChannelSet make_channel_set(std::vector<CMat> per_user) {
  ChannelSet cs;
  cs.per_user = std::move(per_user);
  int rows = 0;
  int m = cs.per_user.empty() ? 0 : cs.per_user.front().cols();
  for (const CMat& h : cs.per_user) {
    if (h.cols() != m) fail(Errc::invalid_config, "channel column mismatch");
    rows += h.rows();
  }
  cs.stacked = CMat(rows, m);
  int r0 = 0;
  for (const CMat& h : cs.per_user) {
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < h.rows(); ++i) cs.stacked(r0 + i, j) = h(i, j);
    r0 += h.rows();
  }
  return cs;
}

namespace {

CMat random_gaussian(Rng& rng, int rows, int cols) {
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian();
  return m;
}

}  // namespace

ChannelSet generate_structured_channel(const SystemConfig& config, double alpha,
                                       std::uint64_t seed) {
  config.validate();
  if (!(alpha > 0.0) || alpha > 1.0)
    fail(Errc::invalid_config, "alpha must lie in (0, 1]");
  Rng rng(seed);
  std::vector<CMat> users;
  users.reserve(size_t(config.num_users));
  for (int k = 0; k < config.num_users; ++k) {
    const int nk = config.rx_antennas[size_t(k)];
    const int m = config.num_tx_antennas;
    const CMat b = random_gaussian(rng, m, nk);
    const CMat a = random_gaussian(rng, nk, nk);
    double trace = 0.0;
    std::vector<double> diag(static_cast<size_t>(nk));
    double w = 1.0;
    for (int i = 0; i < nk; ++i) {
      diag[size_t(i)] = w;
      trace += w;
      w *= alpha;
    }
    const double mu = 1.0 / std::sqrt(trace);
    // H_k^H = B * (mu * diag) * A
    CMat bu = b;
    for (int i = 0; i < nk; ++i) scale_col(bu, i, mu * diag[size_t(i)]);
    users.push_back(adjoint(bu * a));
  }
  return make_channel_set(std::move(users));
}

ChannelSet generate_iid_channel(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::vector<CMat> users;
  users.reserve(size_t(config.num_users));
  for (int k = 0; k < config.num_users; ++k)
    users.push_back(adjoint(
        random_gaussian(rng, config.num_tx_antennas, config.rx_antennas[size_t(k)])));
  return make_channel_set(std::move(users));
}

std::vector<double> user_rates(const SystemConfig& config,
                               const ChannelSet& channel, const CMat& tx_filter,
                               double sigma2) {
  if (!(sigma2 > 0.0)) fail(Errc::invalid_config, "sigma2 must be > 0");
  if (tx_filter.rows() != config.num_tx_antennas ||
      tx_filter.cols() != config.total_streams())
    fail(Errc::invalid_config, "tx_filter shape mismatch");
  const StreamLayout layout(config);
  std::vector<double> rates(size_t(config.num_users), 0.0);
  for (int k = 0; k < config.num_users; ++k) {
    const CMat& hk = channel.per_user[size_t(k)];
    const CMat hg = hk * tx_filter;  // N_k x N_d, columns H_k gc_j
    const int nk = hk.rows();
    CMat interference(nk, nk);
    for (int i = 0; i < nk; ++i) interference(i, i) = sigma2;
    CMat signal(nk, nk);
    for (int j = 0; j < layout.num_streams; ++j) {
      if (layout.user_of_stream[size_t(j)] == k)
        herm_rank1_update(signal, 1.0, hg.col(j));
      else
        herm_rank1_update(interference, 1.0, hg.col(j));
    }
    const double ld_int = CholeskyLLT(interference).log_det();
    const double ld_tot = CholeskyLLT(interference + signal).log_det();
    rates[size_t(k)] = ld_tot - ld_int;
  }
  return rates;
}

}  // namespace ratebal
