// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/duality.hpp"

#include <cmath>

#include "ratebal/simd/kernels.hpp"

namespace ratebal {

namespace {

constexpr double kUnitNormTol = 1e-10;

double col_norm(const CMat& m, int j) {
  return std::sqrt(simd::zdotc(size_t(m.rows()), m.col(j), m.col(j)).real());
}

}  // namespace

void validate_state(const TransceiverState& state, const SystemConfig& config) {
  const StreamLayout layout(config);
  const int nd = layout.num_streams;
  if (state.tx_beamformer.rows() != config.num_tx_antennas ||
      state.tx_beamformer.cols() != nd)
    fail(Errc::invalid_config, "tx beamformer shape mismatch");
  if (int(state.rx_blocks.size()) != config.num_users)
    fail(Errc::invalid_config, "rx block count mismatch");
  if (int(state.beta.size()) != nd || int(state.dl_power.size()) != nd ||
      int(state.ul_power.size()) != nd)
    fail(Errc::invalid_config, "per-stream vector length mismatch");
  for (int j = 0; j < nd; ++j) {
    if (std::abs(col_norm(state.tx_beamformer, j) - 1.0) > kUnitNormTol)
      fail(Errc::invalid_config, "tx beamformer column not unit norm");
  }
  double psum = 0.0, qsum = 0.0;
  for (int j = 0; j < nd; ++j) {
    if (state.dl_power[size_t(j)] < 0.0 || state.ul_power[size_t(j)] < 0.0)
      fail(Errc::invalid_config, "negative stream power");
    psum += state.dl_power[size_t(j)];
    qsum += state.ul_power[size_t(j)];
  }
  const double budget = config.max_power * (1.0 + 1e-8);
  if (psum > budget || qsum > budget)
    fail(Errc::invalid_config, "power budget exceeded");
  for (int k = 0; k < config.num_users; ++k) {
    const CMat& fk = state.rx_blocks[size_t(k)];
    if (fk.rows() != config.rx_antennas[size_t(k)] ||
        fk.cols() != config.streams[size_t(k)])
      fail(Errc::invalid_config, "rx block shape mismatch");
    for (int s = 0; s < fk.cols(); ++s)
      if (std::abs(col_norm(fk, s) - 1.0) > kUnitNormTol)
        fail(Errc::invalid_config, "rx block column not unit norm");
  }
}

CMat cross_gains(const TransceiverState& state, const ChannelSet& channel,
                 const StreamLayout& layout) {
  const CMat hg = channel.stacked * state.tx_beamformer;  // N_r x N_d
  const int nd = layout.num_streams;
  CMat c(nd, nd);
  const int users = int(state.rx_blocks.size());
  for (int k = 0; k < users; ++k) {
    const CMat& fk = state.rx_blocks[size_t(k)];
    const int row0 = layout.antenna_offset[size_t(k)];
    const int s0 = layout.stream_offset[size_t(k)];
    for (int s = 0; s < fk.cols(); ++s)
      for (int j = 0; j < nd; ++j)
        c(s0 + s, j) = simd::zdotc(size_t(fk.rows()), fk.col(s), hg.col(j) + row0);
  }
  return c;
}

StreamMse dl_stream_mse_from_gains(const CMat& gains,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& p, double sigma2) {
  const int nd = gains.rows();
  StreamMse eps(size_t(nd), 1.0);
  for (int i = 0; i < nd; ++i) {
    const double bi = beta[size_t(i)];
    if (bi == 0.0) continue;  // eps stays 1 (scaling vanished)
    const double pi = p[size_t(i)];
    if (!(pi > 0.0))
      fail(Errc::degenerate_power, "stream has zero power but nonzero beta");
    double quad = 0.0;
    for (int j = 0; j < nd; ++j) quad += p[size_t(j)] * std::norm(gains(i, j));
    eps[size_t(i)] = bi * bi / pi * quad - 2.0 * bi * gains(i, i).real() +
                     sigma2 * bi * bi / pi + 1.0;
  }
  return eps;
}

StreamMse ul_stream_mse_from_gains(const CMat& gains,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& q, double sigma2) {
  const int nd = gains.rows();
  StreamMse eps(size_t(nd), 1.0);
  for (int i = 0; i < nd; ++i) {
    const double bi = beta[size_t(i)];
    if (bi == 0.0) continue;
    const double qi = q[size_t(i)];
    if (!(qi > 0.0))
      fail(Errc::degenerate_power, "stream has zero power but nonzero beta");
    double quad = 0.0;
    // g_i^H H^H f_j = conj(C(j, i))
    for (int j = 0; j < nd; ++j) quad += q[size_t(j)] * std::norm(gains(j, i));
    eps[size_t(i)] = bi * bi / qi * quad - 2.0 * bi * gains(i, i).real() +
                     sigma2 * bi * bi / qi + 1.0;
  }
  return eps;
}

DualityCouplings couplings_from_gains(const CMat& gains,
                                      const std::vector<double>& beta) {
  const int nd = gains.rows();
  DualityCouplings dc;
  dc.d.assign(size_t(nd), 0.0);
  dc.psi = RMat(nd, nd);
  for (int i = 0; i < nd; ++i) {
    const double bi = beta[size_t(i)];
    dc.d[size_t(i)] =
        bi * bi * std::norm(gains(i, i)) - 2.0 * bi * gains(i, i).real() + 1.0;
    for (int j = 0; j < nd; ++j)
      if (j != i) dc.psi(i, j) = std::norm(gains(j, i));
  }
  return dc;
}

StreamMse dl_stream_mse(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2) {
  return dl_stream_mse_from_gains(cross_gains(state, channel, layout),
                                  state.beta, state.dl_power, sigma2);
}

StreamMse ul_stream_mse(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2) {
  return ul_stream_mse_from_gains(cross_gains(state, channel, layout),
                                  state.beta, state.ul_power, sigma2);
}

DualityCouplings duality_couplings(const TransceiverState& state,
                                   const ChannelSet& channel,
                                   const StreamLayout& layout) {
  return couplings_from_gains(cross_gains(state, channel, layout), state.beta);
}

namespace {

// Shared core of the power mappings. transpose_psi selects the downlink
// direction (Psi^T). Streams with beta = 0 are excluded and get power 0.
std::vector<double> power_from_mse(const StreamMse& target,
                                   const DualityCouplings& couplings,
                                   const std::vector<double>& beta,
                                   double sigma2, bool transpose_psi) {
  const int nd = int(target.size());
  std::vector<int> active;
  for (int i = 0; i < nd; ++i)
    if (beta[size_t(i)] != 0.0) active.push_back(i);
  const int na = int(active.size());
  std::vector<double> power(size_t(nd), 0.0);
  if (na == 0) return power;

  RMat m(na, na);
  std::vector<double> rhs(static_cast<size_t>(na));
  for (int r = 0; r < na; ++r) {
    const int i = active[size_t(r)];
    const double b2 = beta[size_t(i)] * beta[size_t(i)];
    m(r, r) = target[size_t(i)] - couplings.d[size_t(i)];
    rhs[size_t(r)] = sigma2 * b2;
    for (int c = 0; c < na; ++c) {
      if (c == r) continue;
      const int j = active[size_t(c)];
      const double psi =
          transpose_psi ? couplings.psi(j, i) : couplings.psi(i, j);
      m(r, c) = -b2 * psi;
    }
  }
  const std::vector<double> x = LuSolver(m).solve(rhs);
  for (int r = 0; r < na; ++r) {
    if (!(x[size_t(r)] > 0.0) || !std::isfinite(x[size_t(r)]))
      fail(Errc::infeasible_target,
           "MSE target not reachable with positive powers");
    power[size_t(active[size_t(r)])] = x[size_t(r)];
  }
  return power;
}

}  // namespace

std::vector<double> dl_power_from_mse(const StreamMse& target,
                                      const DualityCouplings& couplings,
                                      const std::vector<double>& beta,
                                      double sigma2) {
  return power_from_mse(target, couplings, beta, sigma2, true);
}

std::vector<double> ul_power_from_mse(const StreamMse& target,
                                      const DualityCouplings& couplings,
                                      const std::vector<double>& beta,
                                      double sigma2) {
  return power_from_mse(target, couplings, beta, sigma2, false);
}

UlReceiverResult ul_mmse_receiver(const ChannelSet& channel,
                                  const StreamLayout& layout,
                                  const std::vector<CMat>& rx_blocks,
                                  const std::vector<double>& q, double sigma2) {
  const int m = channel.stacked.cols();
  const int nd = layout.num_streams;
  // columns H^H f_i, grouped per user: H_k^H F_k
  CMat hf(m, nd);
  for (size_t k = 0; k < rx_blocks.size(); ++k) {
    const CMat hkf = gemm(Op::adjoint, channel.per_user[k], Op::none, rx_blocks[k]);
    const int s0 = layout.stream_offset[k];
    for (int s = 0; s < hkf.cols(); ++s)
      for (int i = 0; i < m; ++i) hf(i, s0 + s) = hkf(i, s);
  }
  CMat cov(m, m);
  for (int i = 0; i < m; ++i) cov(i, i) = sigma2;
  for (int j = 0; j < nd; ++j)
    if (q[size_t(j)] > 0.0) herm_rank1_update(cov, q[size_t(j)], hf.col(j));
  const CholeskyLLT chol(cov);

  UlReceiverResult out;
  out.g = CMat(m, nd);
  out.beta.assign(size_t(nd), 0.0);
  CMat t = hf;
  for (int j = 0; j < nd; ++j) scale_col(t, j, std::sqrt(q[size_t(j)]));
  chol.solve_in_place(t);
  for (int j = 0; j < nd; ++j) {
    const double nrm = col_norm(t, j);
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      fail(Errc::degenerate_receiver, "uplink receive vector vanished");
    for (int i = 0; i < m; ++i) out.g(i, j) = t(i, j) / nrm;
    out.beta[size_t(j)] = nrm * std::sqrt(q[size_t(j)]);
  }
  return out;
}

DlReceiverResult dl_mmse_receiver(const ChannelSet& channel,
                                  const StreamLayout& layout, const CMat& g,
                                  const std::vector<double>& p, double sigma2) {
  DlReceiverResult out;
  out.beta.assign(size_t(layout.num_streams), 0.0);
  const int users = int(channel.per_user.size());
  out.rx_blocks.reserve(size_t(users));
  for (int k = 0; k < users; ++k) {
    const CMat& hk = channel.per_user[size_t(k)];
    const int nk = hk.rows();
    const CMat hg = hk * g;  // N_k x N_d
    CMat cov(nk, nk);
    for (int i = 0; i < nk; ++i) cov(i, i) = sigma2;
    for (int j = 0; j < layout.num_streams; ++j)
      if (p[size_t(j)] > 0.0) herm_rank1_update(cov, p[size_t(j)], hg.col(j));
    const CholeskyLLT chol(cov);

    const int s0 = layout.stream_offset[size_t(k)];
    const int dk = layout.stream_offset[size_t(k) + 1] - s0;
    CMat t(nk, dk);
    for (int s = 0; s < dk; ++s) {
      const double sp = std::sqrt(p[size_t(s0 + s)]);
      for (int i = 0; i < nk; ++i) t(i, s) = hg(i, s0 + s) * sp;
    }
    chol.solve_in_place(t);
    CMat fk(nk, dk);
    for (int s = 0; s < dk; ++s) {
      const double nrm = col_norm(t, s);
      if (!(nrm > 0.0) || !std::isfinite(nrm))
        fail(Errc::degenerate_receiver, "downlink receive vector vanished");
      for (int i = 0; i < nk; ++i) fk(i, s) = t(i, s) / nrm;
      out.beta[size_t(s0 + s)] = nrm * std::sqrt(p[size_t(s0 + s)]);
    }
    out.rx_blocks.push_back(std::move(fk));
  }
  return out;
}

CMat dl_user_mse_matrix(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2, int user) {
  const int s0 = layout.stream_offset[size_t(user)];
  const int dk = layout.stream_offset[size_t(user) + 1] - s0;
  for (int s = 0; s < dk; ++s)
    if (!(state.dl_power[size_t(s0 + s)] > 0.0))
      fail(Errc::degenerate_power, "user stream with zero downlink power");

  const CMat& hk = channel.per_user[size_t(user)];
  // receive chain Fc_k = F_k beta_k P_k^{-1/2}  (N_k x d_k)
  CMat fc = state.rx_blocks[size_t(user)];
  for (int s = 0; s < dk; ++s)
    scale_col(fc, s,
              state.beta[size_t(s0 + s)] / std::sqrt(state.dl_power[size_t(s0 + s)]));
  // effective gains Fc^H H_k Gc for the full transmit filter Gc = G P^{1/2}
  CMat hg = hk * state.tx_beamformer;  // N_k x N_d
  for (int j = 0; j < layout.num_streams; ++j)
    scale_col(hg, j, std::sqrt(state.dl_power[size_t(j)]));
  const CMat eff = gemm(Op::adjoint, fc, Op::none, hg);  // d_k x N_d

  // signal part (I - Fc^H H_k Gc_k)(...)^H
  CMat z(dk, dk);
  for (int s = 0; s < dk; ++s)
    for (int r = 0; r < dk; ++r)
      z(r, s) = ((r == s) ? cxd(1.0, 0.0) : cxd(0.0, 0.0)) - eff(r, s0 + s);
  CMat e = gram(z);
  // interference received through H_k from every other user's streams
  for (int j = 0; j < layout.num_streams; ++j) {
    if (layout.user_of_stream[size_t(j)] == user) continue;
    herm_rank1_update(e, 1.0, eff.col(j));
  }
  // noise: s2 Fc^H Fc
  const CMat fcg = gram_adj(fc);
  for (int s = 0; s < dk; ++s)
    for (int r = 0; r < dk; ++r) e(r, s) += sigma2 * fcg(r, s);
  return e;
}

CMat ul_user_mse_matrix(const TransceiverState& state, const ChannelSet& channel,
                        const StreamLayout& layout, double sigma2, int user) {
  const int s0 = layout.stream_offset[size_t(user)];
  const int dk = layout.stream_offset[size_t(user) + 1] - s0;
  const int m = channel.stacked.cols();
  for (int s = 0; s < dk; ++s)
    if (!(state.ul_power[size_t(s0 + s)] > 0.0))
      fail(Errc::degenerate_power, "user stream with zero uplink power");

  // receive chain (Q_k^{-1/2} beta_k G_k^H)^H = G_k beta_k Q_k^{-1/2}
  CMat grecv(m, dk);
  for (int s = 0; s < dk; ++s) {
    const double w =
        state.beta[size_t(s0 + s)] / std::sqrt(state.ul_power[size_t(s0 + s)]);
    for (int i = 0; i < m; ++i)
      grecv(i, s) = state.tx_beamformer(i, s0 + s) * w;
  }

  // uplink transmit columns H_j^H f_i sqrt(q_i) for every stream
  CMat tx(m, layout.num_streams);
  for (size_t k = 0; k < state.rx_blocks.size(); ++k) {
    const CMat hkf =
        gemm(Op::adjoint, channel.per_user[k], Op::none, state.rx_blocks[k]);
    const int off = layout.stream_offset[k];
    for (int s = 0; s < hkf.cols(); ++s) {
      const double sq = std::sqrt(state.ul_power[size_t(off + s)]);
      for (int i = 0; i < m; ++i) tx(i, off + s) = hkf(i, s) * sq;
    }
  }
  const CMat eff = gemm(Op::adjoint, grecv, Op::none, tx);  // d_k x N_d

  CMat z(dk, dk);
  for (int s = 0; s < dk; ++s)
    for (int r = 0; r < dk; ++r)
      z(r, s) = ((r == s) ? cxd(1.0, 0.0) : cxd(0.0, 0.0)) - eff(r, s0 + s);
  CMat e = gram(z);
  for (int j = 0; j < layout.num_streams; ++j) {
    if (layout.user_of_stream[size_t(j)] == user) continue;
    herm_rank1_update(e, 1.0, eff.col(j));
  }
  const CMat gg = gram_adj(grecv);
  for (int s = 0; s < dk; ++s)
    for (int r = 0; r < dk; ++r) e(r, s) += sigma2 * gg(r, s);
  return e;
}

}  // namespace ratebal
