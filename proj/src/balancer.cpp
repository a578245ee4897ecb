// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/balancer.hpp"

#include <cmath>
#include <string>

namespace ratebal {

namespace {

// Tolerances of the built-in sanity checks (violations throw
// Errc::numerical_failure and abort the trial).
constexpr double kPowerConservationTol = 1e-8;   // relative to P_max
constexpr double kMseMatchTol = 1e-9;            // duality reproduction
constexpr double kLevelMonotonicityTol = 1e-9;   // inner level increase
constexpr double kScaleFloorTol = 1e-9;          // t >= 1 slack from m >= 3
constexpr double kRateAgreementTol = 1e-2;       // ln det W vs direct, at stop

void check_power_sum(const std::vector<double>& power, double p_max,
                     const char* which) {
  double s = 0.0;
  for (double x : power) s += x;
  if (std::abs(s - p_max) > kPowerConservationTol * p_max)
    fail(Errc::numerical_failure,
         std::string("sum power not conserved in ") + which);
}

void check_mse_match(const StreamMse& got, const StreamMse& want,
                     const char* which) {
  for (size_t i = 0; i < got.size(); ++i)
    if (std::abs(got[i] - want[i]) > kMseMatchTol * (1.0 + std::abs(want[i])))
      fail(Errc::numerical_failure,
           std::string("duality mapping missed the MSE target in ") + which);
}

CMat composite_tx_filter(const TransceiverState& state) {
  CMat gc = state.tx_beamformer;
  for (int j = 0; j < gc.cols(); ++j)
    scale_col(gc, j, std::sqrt(state.dl_power[size_t(j)]));
  return gc;
}

std::vector<CMat> collect_ul_mse_matrices(const TransceiverState& state,
                                          const ChannelSet& channel,
                                          const StreamLayout& layout,
                                          const SystemConfig& config) {
  std::vector<CMat> e;
  e.reserve(size_t(config.num_users));
  for (int k = 0; k < config.num_users; ++k)
    e.push_back(ul_user_mse_matrix(state, channel, layout,
                                   config.noise_variance, k));
  return e;
}

struct LoopControl {
  const SystemConfig& config;
  const ChannelSet& channel;
  const StreamLayout& layout;
};

struct InnerLoopStats {
  int used = 0;
  bool settled = false;
};

// Runs inner sweeps until the balanced level settles or the cap is hit.
// Appends levels to trace.
InnerLoopStats run_inner_loop(LoopControl& lc, TransceiverState& state,
                              const WeightState& weights, int cap, double tol,
                              std::vector<double>& trace) {
  double prev = -1.0;
  InnerLoopStats stats;
  for (int n = 0; n < cap; ++n) {
    const InnerResult res =
        inner_iteration(state, weights, lc.config, lc.channel, lc.layout);
    ++stats.used;
    if (prev >= 0.0 && res.delta > prev + kLevelMonotonicityTol)
      fail(Errc::numerical_failure, "inner balanced level increased");
    trace.push_back(res.delta);
    stats.settled = prev >= 0.0 && std::abs(res.delta - prev) <= tol * res.delta;
    prev = res.delta;
    if (stats.settled) break;
  }
  return stats;
}

}  // namespace

void validate_params(const BalancerParams& p) {
  if (p.n_max < 1 || p.m_max < 1)
    fail(Errc::invalid_config, "iteration caps must be >= 1");
  if (!(p.inner_tol > 0.0) || !(p.outer_tol > 0.0))
    fail(Errc::invalid_config, "tolerances must be > 0");
}

InitResult initialize(const SystemConfig& config, const ChannelSet& channel,
                      const BalancerParams& params) {
  config.validate();
  validate_params(params);
  const StreamLayout layout(config);
  const int nd = layout.num_streams;

  InitResult out;
  TransceiverState& st = out.state;
  st.rx_blocks.reserve(size_t(config.num_users));
  for (int k = 0; k < config.num_users; ++k) {
    // F_k^H = (I : 0): pick the first d_k receive antennas
    CMat fk(config.rx_antennas[size_t(k)], config.streams[size_t(k)]);
    for (int s = 0; s < fk.cols(); ++s) fk(s, s) = 1.0;
    st.rx_blocks.push_back(std::move(fk));
  }
  st.ul_power.assign(size_t(nd), config.max_power / nd);
  st.dl_power.assign(size_t(nd), 0.0);

  UlReceiverResult ul = ul_mmse_receiver(channel, layout, st.rx_blocks,
                                         st.ul_power, config.noise_variance);
  st.tx_beamformer = std::move(ul.g);
  st.beta = std::move(ul.beta);

  WeightState& ws = out.weights;
  ws.w.reserve(size_t(config.num_users));
  ws.xi.resize(size_t(config.num_users));
  for (int k = 0; k < config.num_users; ++k) {
    ws.w.push_back(CMat::identity(config.streams[size_t(k)]));
    ws.xi[size_t(k)] = double(config.streams[size_t(k)]);
  }
  ws.rate_targets = config.rate_priorities;
  ws.t = 0.0;

  // first balanced user power split on the uniform shapes
  const CouplingSystem cs = wmse_coefficients(st, channel, layout, ws.w);
  const RMat lambda =
      build_coupling_matrix(cs, ws.xi, config.noise_variance, config.max_power);
  const PerronResult pr = perron_solve(lambda, config.max_power);
  for (int k = 0; k < config.num_users; ++k) {
    const int s0 = layout.stream_offset[size_t(k)];
    const int dk = layout.stream_offset[size_t(k) + 1] - s0;
    for (int s = 0; s < dk; ++s)
      st.ul_power[size_t(s0 + s)] =
          pr.qtilde[size_t(k)] * cs.qbar[size_t(k)][size_t(s)];
  }
  return out;
}

InnerResult inner_iteration(TransceiverState& state, const WeightState& weights,
                            const SystemConfig& config, const ChannelSet& channel,
                            const StreamLayout& layout) {
  const double sigma2 = config.noise_variance;
  int step = 0;
  try {
    // (1) uplink MMSE receiver
    step = 1;
    UlReceiverResult ul = ul_mmse_receiver(channel, layout, state.rx_blocks,
                                           state.ul_power, sigma2);
    state.tx_beamformer = std::move(ul.g);
    state.beta = std::move(ul.beta);

    // (2) uplink per-stream MSEs
    step = 2;
    CMat gains = cross_gains(state, channel, layout);
    InnerResult res;
    res.ul_mse =
        ul_stream_mse_from_gains(gains, state.beta, state.ul_power, sigma2);

    // (3) downlink powers achieving the uplink MSEs
    step = 3;
    DualityCouplings coup = couplings_from_gains(gains, state.beta);
    state.dl_power = dl_power_from_mse(res.ul_mse, coup, state.beta, sigma2);
    check_power_sum(state.dl_power, config.max_power, "downlink mapping");
    check_mse_match(
        dl_stream_mse_from_gains(gains, state.beta, state.dl_power, sigma2),
        res.ul_mse, "downlink mapping");

    // (4) downlink MMSE receiver
    step = 4;
    DlReceiverResult dl =
        dl_mmse_receiver(channel, layout, state.tx_beamformer, state.dl_power,
                         sigma2);
    state.rx_blocks = std::move(dl.rx_blocks);
    state.beta = std::move(dl.beta);

    // (5) downlink per-stream MSEs
    step = 5;
    gains = cross_gains(state, channel, layout);
    res.dl_mse =
        dl_stream_mse_from_gains(gains, state.beta, state.dl_power, sigma2);

    // (6) uplink powers achieving the downlink MSEs
    step = 6;
    coup = couplings_from_gains(gains, state.beta);
    state.ul_power = ul_power_from_mse(res.dl_mse, coup, state.beta, sigma2);
    check_power_sum(state.ul_power, config.max_power, "uplink mapping");
    check_mse_match(
        ul_stream_mse_from_gains(gains, state.beta, state.ul_power, sigma2),
        res.dl_mse, "uplink mapping");

    // (7)+(8) per-user shape renormalization and balanced power split
    step = 7;
    const CouplingSystem cs = wmse_coefficients(state, channel, layout, weights.w);
    step = 8;
    const RMat lambda =
        build_coupling_matrix(cs, weights.xi, sigma2, config.max_power);
    const PerronResult pr = perron_solve(lambda, config.max_power);
    for (int k = 0; k < config.num_users; ++k) {
      const int s0 = layout.stream_offset[size_t(k)];
      const int dk = layout.stream_offset[size_t(k) + 1] - s0;
      for (int s = 0; s < dk; ++s)
        state.ul_power[size_t(s0 + s)] =
            pr.qtilde[size_t(k)] * cs.qbar[size_t(k)][size_t(s)];
    }
    res.delta = pr.delta;
    return res;
  } catch (const Error& e) {
    if (e.code() == Errc::numerical_failure && e.step() < 0) throw;
    throw Error(Errc::iteration_failure,
                "inner sweep failed at step " + std::to_string(step) + ": " +
                    e.what(),
                step);
  }
}

std::vector<double> outer_update(WeightState& weights,
                                 const std::vector<CMat>& ul_mse_matrices,
                                 const SystemConfig& config) {
  const int users = config.num_users;
  std::vector<double> rates(static_cast<size_t>(users));
  std::vector<CMat> w_new;
  w_new.reserve(size_t(users));
  for (int k = 0; k < users; ++k) {
    try {
      const CholeskyLLT chol(ul_mse_matrices[size_t(k)]);
      rates[size_t(k)] = -chol.log_det();  // ln det W_k
      w_new.push_back(chol.inverse());
    } catch (const Error&) {
      fail(Errc::numerical_failure, "uplink MSE matrix not invertible");
    }
  }
  double t = rates[0] / weights.rate_targets[0];
  for (int k = 1; k < users; ++k)
    t = std::min(t, rates[size_t(k)] / weights.rate_targets[size_t(k)]);
  for (int k = 0; k < users; ++k) {
    weights.rate_targets[size_t(k)] *= t;
    weights.xi[size_t(k)] = double(config.streams[size_t(k)]) +
                            rates[size_t(k)] - weights.rate_targets[size_t(k)];
    if (!(weights.xi[size_t(k)] > 0.0))
      fail(Errc::numerical_failure, "weighted-MSE target collapsed");
  }
  weights.w = std::move(w_new);
  weights.t = t;
  return rates;
}

BalancerReport balance_rates(const SystemConfig& config, const ChannelSet& channel,
                             const BalancerParams& params) {
  const StreamLayout layout(config);
  InitResult init = initialize(config, channel, params);
  TransceiverState& state = init.state;
  WeightState& weights = init.weights;
  LoopControl lc{config, channel, layout};

  BalancerReport report;
  for (int m = 1; m <= params.m_max; ++m) {
    report.delta_trace.emplace_back();
    const InnerLoopStats stats =
        run_inner_loop(lc, state, weights, params.n_max, params.inner_tol,
                       report.delta_trace.back());
    report.inner_iterations_used.push_back(stats.used);
    report.balanced_level = report.delta_trace.back().back();

    const std::vector<CMat> e_ul =
        collect_ul_mse_matrices(state, channel, layout, config);
    const std::vector<double> rates_ul = outer_update(weights, e_ul, config);
    if (m >= 3 && weights.t < 1.0 - kScaleFloorTol)
      fail(Errc::numerical_failure, "scale factor dropped below 1");

    report.t_trace.push_back(weights.t);
    report.rate_trace.push_back(rates_ul);
    report.rate_trace_dl.push_back(
        user_rates(config, channel, composite_tx_filter(state),
                   config.noise_variance));
    report.outer_iterations = m;
    if (std::abs(weights.t - 1.0) <= params.outer_tol) {
      report.converged = true;
      break;
    }
  }

  report.rates = report.rate_trace_dl.back();
  if (report.converged) {
    // the two rate routes must coincide at the fixed point
    const std::vector<double>& lndet = report.rate_trace.back();
    for (size_t k = 0; k < report.rates.size(); ++k)
      if (std::abs(lndet[k] - report.rates[k]) >
          kRateAgreementTol * std::max(1.0, std::abs(report.rates[k])))
        fail(Errc::numerical_failure,
             "rate mismatch between ln det W and direct evaluation");
  }
  report.final_state = std::move(state);
  report.final_weights = std::move(weights);
  return report;
}

BalancerReport balance_mse_unweighted(const SystemConfig& config,
                                      const ChannelSet& channel,
                                      const BalancerParams& params) {
  const StreamLayout layout(config);
  InitResult init = initialize(config, channel, params);
  TransceiverState& state = init.state;
  const WeightState& weights = init.weights;  // identity W, xi = d, frozen
  LoopControl lc{config, channel, layout};

  BalancerReport report;
  report.delta_trace.emplace_back();
  const long budget = long(params.n_max) * params.m_max;
  const int cap = int(std::min<long>(budget, 1000000));
  const InnerLoopStats stats = run_inner_loop(lc, state, weights, cap,
                                              params.inner_tol,
                                              report.delta_trace.back());
  report.inner_iterations_used.push_back(stats.used);
  report.balanced_level = report.delta_trace.back().back();
  report.converged = stats.settled;
  report.rates = user_rates(config, channel, composite_tx_filter(state),
                            config.noise_variance);
  report.final_state = std::move(state);
  report.final_weights = init.weights;
  return report;
}

}  // namespace ratebal
