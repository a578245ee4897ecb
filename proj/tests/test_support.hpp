// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors
//
// Shared fixtures and independent oracles. The oracle implementations here
// deliberately avoid the library's cross-gain/coupling code paths: they work
// from zero-padded vectors, explicit scalar loops, or Eigen decompositions,
// so that agreement with the library is meaningful evidence.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ratebal/duality.hpp"
#include "ratebal/rng.hpp"
#include "ratebal/system_model.hpp"

namespace ratebal::testing {

inline SystemConfig make_config(int m, int k, int n_per_user, int d_per_user,
                                double p_max = 1.0, double sigma2 = 0.1) {
  SystemConfig c;
  c.num_tx_antennas = m;
  c.num_users = k;
  c.rx_antennas.assign(size_t(k), n_per_user);
  c.streams.assign(size_t(k), d_per_user);
  c.max_power = p_max;
  c.noise_variance = sigma2;
  c.rate_priorities.assign(size_t(k), 1.0);
  return c;
}

inline CMat random_matrix(Rng& rng, int rows, int cols) {
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian();
  return m;
}

inline void normalize_columns(CMat& m) {
  for (int j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) s += std::norm(m(i, j));
    const double inv = 1.0 / std::sqrt(s);
    for (int i = 0; i < m.rows(); ++i) m(i, j) *= inv;
  }
}

inline std::vector<double> random_positive_sum(Rng& rng, int n, double total) {
  std::vector<double> v(static_cast<size_t>(n));
  double s = 0.0;
  for (double& x : v) {
    x = 0.1 + rng.uniform();
    s += x;
  }
  for (double& x : v) x *= total / s;
  return v;
}

/// Random valid transceiver state: unit-norm filters, positive scalings,
/// powers with the given sums.
inline TransceiverState random_state(Rng& rng, const SystemConfig& config,
                                     double dl_sum, double ul_sum) {
  const StreamLayout layout(config);
  TransceiverState st;
  st.tx_beamformer = random_matrix(rng, config.num_tx_antennas,
                                   layout.num_streams);
  normalize_columns(st.tx_beamformer);
  for (int k = 0; k < config.num_users; ++k) {
    CMat fk = random_matrix(rng, config.rx_antennas[size_t(k)],
                            config.streams[size_t(k)]);
    normalize_columns(fk);
    st.rx_blocks.push_back(std::move(fk));
  }
  st.beta.resize(size_t(layout.num_streams));
  for (double& b : st.beta) b = rng.uniform(0.25, 2.0);
  st.dl_power = random_positive_sum(rng, layout.num_streams, dl_sum);
  st.ul_power = random_positive_sum(rng, layout.num_streams, ul_sum);
  return st;
}

/// Zero-padded full receive vector of stream i (length sum N_k).
inline std::vector<cxd> padded_rx_vector(const TransceiverState& st,
                                         const StreamLayout& layout, int i) {
  const int user = layout.user_of_stream[size_t(i)];
  const int local = i - layout.stream_offset[size_t(user)];
  const CMat& fk = st.rx_blocks[size_t(user)];
  std::vector<cxd> f(size_t(layout.antenna_offset.back()), cxd(0.0, 0.0));
  for (int r = 0; r < fk.rows(); ++r)
    f[size_t(layout.antenna_offset[size_t(user)] + r)] = fk(r, local);
  return f;
}

/// Straight-line evaluation of the downlink per-stream MSE formula from the
/// stacked channel and zero-padded receive vectors; plain scalar loops.
inline double dl_mse_oracle(const TransceiverState& st, const ChannelSet& ch,
                            const StreamLayout& layout, double sigma2, int i) {
  const int nr = ch.stacked.rows();
  const int m = ch.stacked.cols();
  const int nd = layout.num_streams;
  const std::vector<cxd> f = padded_rx_vector(st, layout, i);
  // v = H^H f_i
  std::vector<cxd> v(size_t(m), cxd(0.0, 0.0));
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < nr; ++r)
      v[size_t(c)] += std::conj(ch.stacked(r, c)) * f[size_t(r)];
  // quad = v^H (sum_j p_j g_j g_j^H) v  evaluated as sum_j p_j |g_j^H v|^2;
  // note f^H H g = (g^H v)^* so |f^H H g_j|^2 = |g_j^H v|^2
  double quad = 0.0;
  cxd direct(0.0, 0.0);
  for (int j = 0; j < nd; ++j) {
    cxd dot(0.0, 0.0);
    for (int c = 0; c < m; ++c)
      dot += std::conj(st.tx_beamformer(c, j)) * v[size_t(c)];
    quad += st.dl_power[size_t(j)] * std::norm(dot);
    if (j == i) direct = std::conj(dot);  // f_i^H H g_i
  }
  const double b = st.beta[size_t(i)];
  const double p = st.dl_power[size_t(i)];
  return b * b / p * quad - 2.0 * b * direct.real() + sigma2 * b * b / p + 1.0;
}

inline Eigen::MatrixXcd to_eigen(const CMat& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) e(i, j) = m(i, j);
  return e;
}

inline Eigen::MatrixXd to_eigen(const RMat& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) e(i, j) = m(i, j);
  return e;
}

struct PerronOracle {
  double radius;
  std::vector<double> eigvec;  // normalized to unit 1-norm, nonnegative
};

/// Dense brute-force Perron pair via Eigen's general eigensolver.
inline PerronOracle perron_oracle(const RMat& m) {
  const Eigen::MatrixXd a = to_eigen(m);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  int best = 0;
  double best_mag = -1.0;
  for (int i = 0; i < a.rows(); ++i) {
    const double mag = std::abs(es.eigenvalues()(i));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  PerronOracle out;
  out.radius = es.eigenvalues()(best).real();
  Eigen::VectorXcd v = es.eigenvectors().col(best);
  // rotate to the real nonnegative representative
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::abs(v(i));
  out.eigvec.resize(size_t(v.size()));
  for (int i = 0; i < v.size(); ++i) out.eigvec[size_t(i)] = std::abs(v(i)) / s;
  return out;
}

}  // namespace ratebal::testing
