// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <vector>

#include "ratebal/duality.hpp"

namespace ratebal {

/// Weight/target bundle of the outer loop: Hermitian positive definite
/// weight matrices W_k, weighted-MSE targets xi_k, current rate targets
/// r_k (the priorities rescaled by the running factor t).
struct WeightState {
  std::vector<CMat> w;
  std::vector<double> xi;
  std::vector<double> rate_targets;
  double t = 0.0;  ///< scale factor of the most recent outer update
};

/// User-level coupling coefficients of the uplink weighted MSE as a
/// function of the per-user powers qt:
///   wmse_k(qt) = a(k,k) + qt_k^{-1} sum_{j!=k} qt_j a(k,j) + qt_k^{-1} c_k s2.
/// qbar holds the fixed unit-trace per-user power shapes the coefficients
/// were computed for.
struct CouplingSystem {
  RMat a;                 ///< K x K, diagonal a_k, off-diagonal b_kj
  std::vector<double> c;  ///< length K
  std::vector<std::vector<double>> qbar;
};

/// tr(W_k E_k), real for Hermitian inputs.
double user_wmse(const CMat& w, const CMat& e);

/// Builds the coupling coefficients from the current filters and the
/// per-user power shapes derived from state.ul_power (each user's stream
/// powers normalized to unit sum). Throws Errc::degenerate_shape when a
/// stream power vanishes, since the shape factors q_bar^{-1/2} then fail.
///
/// The q-independent reading of the coefficients is used: every power-shape
/// factor inside a_k, b_kj, c_k comes from the unit-trace shapes, so the
/// per-user powers enter the weighted MSE only through the displayed
/// qt-dependence. This is the reading under which the coefficient form
/// reproduces tr(W_k E_k^UL) exactly for any positive user powers.
CouplingSystem wmse_coefficients(const TransceiverState& state,
                                 const ChannelSet& channel,
                                 const StreamLayout& layout,
                                 const std::vector<CMat>& w);

/// Extended coupling matrix Lambda = xi^{-1} A + (s2/P_max) xi^{-1} C 1 1^T.
/// Throws Errc::invalid_target for nonpositive xi.
RMat build_coupling_matrix(const CouplingSystem& cs,
                           const std::vector<double>& xi, double sigma2,
                           double p_max);

struct PerronResult {
  double delta = 0.0;           ///< spectral radius (balanced level)
  std::vector<double> qtilde;   ///< positive, sums to p_max
  int iterations = 0;
};

/// Principal eigenpair of a nonnegative coupling matrix by power iteration
/// (deterministic uniform start, relative residual 1e-12, cap 1e5). The
/// eigenvector is scaled to sum p_max. Throws Errc::degenerate_coupling if
/// the eigenvector is not strictly positive (reducible coupling) and
/// Errc::numerical_failure if the iteration fails to settle.
PerronResult perron_solve(const RMat& lambda, double p_max);

}  // namespace ratebal
