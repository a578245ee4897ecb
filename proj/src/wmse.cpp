// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/wmse.hpp"

#include <algorithm>
#include <cmath>

namespace ratebal {

double user_wmse(const CMat& w, const CMat& e) {
  if (w.rows() != e.rows() || w.cols() != e.cols() || w.rows() != w.cols())
    fail(Errc::spec_error, "user_wmse: shape mismatch");
  double s = 0.0;
  for (int i = 0; i < w.rows(); ++i)
    for (int l = 0; l < w.cols(); ++l) s += (w(i, l) * e(l, i)).real();
  return s;
}

CouplingSystem wmse_coefficients(const TransceiverState& state,
                                 const ChannelSet& channel,
                                 const StreamLayout& layout,
                                 const std::vector<CMat>& w) {
  const int users = int(state.rx_blocks.size());
  const int m = channel.stacked.cols();
  CouplingSystem cs;
  cs.a = RMat(users, users);
  cs.c.assign(size_t(users), 0.0);
  cs.qbar.resize(size_t(users));

  for (int k = 0; k < users; ++k) {
    const int s0 = layout.stream_offset[size_t(k)];
    const int dk = layout.stream_offset[size_t(k) + 1] - s0;
    double tr = 0.0;
    for (int s = 0; s < dk; ++s) tr += state.ul_power[size_t(s0 + s)];
    if (!(tr > 0.0))
      fail(Errc::degenerate_shape, "user has zero total uplink power");
    auto& qb = cs.qbar[size_t(k)];
    qb.resize(size_t(dk));
    for (int s = 0; s < dk; ++s) {
      qb[size_t(s)] = state.ul_power[size_t(s0 + s)] / tr;
      if (!(qb[size_t(s)] > 0.0))
        fail(Errc::degenerate_shape, "stream power shape vanished");
    }
  }

  // per-user shaped uplink transmit columns H_k^H F_k qbar_k^{1/2}
  std::vector<CMat> tx(static_cast<size_t>(users));
  for (int k = 0; k < users; ++k) {
    CMat t = gemm(Op::adjoint, channel.per_user[size_t(k)], Op::none,
                  state.rx_blocks[size_t(k)]);
    for (int s = 0; s < t.cols(); ++s)
      scale_col(t, s, std::sqrt(cs.qbar[size_t(k)][size_t(s)]));
    tx[size_t(k)] = std::move(t);
  }

  for (int k = 0; k < users; ++k) {
    const int s0 = layout.stream_offset[size_t(k)];
    const int dk = layout.stream_offset[size_t(k) + 1] - s0;
    // shaped receive chain (qbar^{-1/2} beta G_k^H)^H
    CMat u(m, dk);
    for (int s = 0; s < dk; ++s) {
      const double wgt =
          state.beta[size_t(s0 + s)] / std::sqrt(cs.qbar[size_t(k)][size_t(s)]);
      for (int i = 0; i < m; ++i)
        u(i, s) = state.tx_beamformer(i, s0 + s) * wgt;
    }
    for (int j = 0; j < users; ++j) {
      const CMat y = gemm(Op::adjoint, u, Op::none, tx[size_t(j)]);
      if (j == k) {
        CMat z(dk, dk);
        for (int s = 0; s < dk; ++s)
          for (int r = 0; r < dk; ++r)
            z(r, s) = ((r == s) ? cxd(1.0, 0.0) : cxd(0.0, 0.0)) - y(r, s);
        cs.a(k, k) = user_wmse(w[size_t(k)], gram(z));
      } else {
        cs.a(k, j) = user_wmse(w[size_t(k)], gram(y));
      }
    }
    cs.c[size_t(k)] = user_wmse(w[size_t(k)], gram_adj(u));
  }
  return cs;
}

RMat build_coupling_matrix(const CouplingSystem& cs,
                           const std::vector<double>& xi, double sigma2,
                           double p_max) {
  const int users = cs.a.rows();
  if (int(xi.size()) != users)
    fail(Errc::spec_error, "coupling matrix: xi length mismatch");
  RMat lambda(users, users);
  const double noise_scale = sigma2 / p_max;
  for (int k = 0; k < users; ++k) {
    if (!(xi[size_t(k)] > 0.0))
      fail(Errc::invalid_target, "nonpositive weighted-MSE target");
    const double inv_xi = 1.0 / xi[size_t(k)];
    for (int j = 0; j < users; ++j) {
      double v = inv_xi * (cs.a(k, j) + noise_scale * cs.c[size_t(k)]);
      // coefficients are traces of PSD products; clip roundoff-negative zeros
      if (v < 0.0) {
        if (v < -1e-12)
          fail(Errc::numerical_failure, "negative coupling coefficient");
        v = 0.0;
      }
      lambda(k, j) = v;
    }
  }
  return lambda;
}

PerronResult perron_solve(const RMat& lambda, double p_max) {
  const int n = lambda.rows();
  if (n < 1 || lambda.cols() != n)
    fail(Errc::spec_error, "perron_solve: matrix not square");
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (lambda(i, j) < 0.0 || !std::isfinite(lambda(i, j)))
        fail(Errc::spec_error, "perron_solve: matrix not nonnegative");

  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 100000;
  std::vector<double> v(size_t(n), 1.0 / n);
  double delta = 0.0;
  int it = 0;
  bool settled = false;
  for (; it < kMaxIter; ++it) {
    const std::vector<double> wv = matvec(lambda, v);
    double sum = 0.0;
    for (double x : wv) sum += x;
    if (!(sum > 0.0))
      fail(Errc::degenerate_coupling, "coupling matrix annihilated iterate");
    // with ||v||_1 = 1 and v >= 0, the 1-norm of Lambda v estimates the radius
    delta = sum;
    double resid = 0.0, vmax = 0.0;
    for (int i = 0; i < n; ++i) {
      resid = std::max(resid, std::abs(wv[size_t(i)] - delta * v[size_t(i)]));
      vmax = std::max(vmax, v[size_t(i)]);
    }
    if (resid <= kTol * delta * vmax) {
      settled = true;  // return the iterate whose residual was measured
      break;
    }
    for (int i = 0; i < n; ++i) v[size_t(i)] = wv[size_t(i)] / sum;
  }
  if (!settled)
    fail(Errc::numerical_failure, "power iteration did not converge");

  const double vmax = *std::max_element(v.begin(), v.end());
  for (double x : v)
    if (x <= 1e-9 * vmax)
      fail(Errc::degenerate_coupling,
           "principal eigenvector not strictly positive");

  double vsum = 0.0;
  for (double x : v) vsum += x;
  PerronResult out;
  out.delta = delta;
  out.iterations = it + 1;
  out.qtilde.resize(size_t(n));
  for (int i = 0; i < n; ++i) out.qtilde[size_t(i)] = p_max * v[size_t(i)] / vsum;
  return out;
}

}  // namespace ratebal
