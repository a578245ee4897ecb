// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ratebal/balancer.hpp"
#include "ratebal/rng.hpp"
#include "test_support.hpp"

using namespace ratebal;
using testing::make_config;

namespace {

double snr_sigma2(double p_max, double snr_db) {
  return p_max / std::pow(10.0, snr_db / 10.0);
}

}  // namespace

TEST_CASE("initialize follows the start-up recipe") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  const ChannelSet ch = generate_structured_channel(c, 0.3, 5);
  const InitResult init = initialize(c, ch, BalancerParams{});

  // N_k = d_k makes the selection filter the identity
  for (const CMat& fk : init.state.rx_blocks)
    CHECK(max_abs_diff(fk, CMat::identity(2)) == 0.0);

  // identity weights, xi = d
  for (int k = 0; k < 3; ++k) {
    CHECK(max_abs_diff(init.weights.w[size_t(k)], CMat::identity(2)) == 0.0);
    CHECK(init.weights.xi[size_t(k)] == 2.0);
    CHECK(init.weights.rate_targets[size_t(k)] == 1.0);
  }

  // balanced split uses the whole budget
  double qsum = 0.0;
  for (double q : init.state.ul_power) qsum += q;
  CHECK(qsum == doctest::Approx(1.0).epsilon(1e-12));
  validate_state(init.state, c);
}

TEST_CASE("inner_iteration balances the weighted MSE ratios") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  const StreamLayout layout(c);
  const ChannelSet ch = generate_structured_channel(c, 0.3, 6);
  InitResult init = initialize(c, ch, BalancerParams{});

  const InnerResult res =
      inner_iteration(init.state, init.weights, c, ch, layout);
  double ratio0 = -1.0;
  for (int k = 0; k < 3; ++k) {
    const CMat e =
        ul_user_mse_matrix(init.state, ch, layout, c.noise_variance, k);
    const double ratio =
        user_wmse(init.weights.w[size_t(k)], e) / init.weights.xi[size_t(k)];
    if (k == 0)
      ratio0 = ratio;
    else
      CHECK(std::abs(ratio - ratio0) < 1e-6 * ratio0);
  }
  CHECK(std::abs(ratio0 - res.delta) < 1e-6 * res.delta);
}

TEST_CASE("inner_iteration is a fixed point after tight convergence") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  const StreamLayout layout(c);
  const ChannelSet ch = generate_structured_channel(c, 0.3, 7);
  InitResult init = initialize(c, ch, BalancerParams{});

  double delta = 0.0;
  for (int n = 0; n < 400; ++n)
    delta = inner_iteration(init.state, init.weights, c, ch, layout).delta;
  const double once_more =
      inner_iteration(init.state, init.weights, c, ch, layout).delta;
  CHECK(std::abs(once_more - delta) < 1e-8);
}

TEST_CASE("single-user inner iteration reduces to weighted MMSE refinement") {
  const SystemConfig c = make_config(4, 1, 2, 2, 1.0, 0.2);
  const StreamLayout layout(c);
  const ChannelSet ch = generate_iid_channel(c, 11);
  InitResult init = initialize(c, ch, BalancerParams{});
  const InnerResult res =
      inner_iteration(init.state, init.weights, c, ch, layout);
  const CMat e = ul_user_mse_matrix(init.state, ch, layout, 0.2, 0);
  CHECK(res.delta ==
        doctest::Approx(user_wmse(init.weights.w[0], e) / init.weights.xi[0])
            .epsilon(1e-9));
  double qsum = 0.0;
  for (double q : init.state.ul_power) qsum += q;
  CHECK(qsum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("outer_update recipe: targets, xi, and the minimum user") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  const StreamLayout layout(c);
  const ChannelSet ch = generate_structured_channel(c, 0.3, 8);
  InitResult init = initialize(c, ch, BalancerParams{});
  for (int n = 0; n < 5; ++n)
    inner_iteration(init.state, init.weights, c, ch, layout);

  std::vector<CMat> e_ul;
  for (int k = 0; k < 3; ++k)
    e_ul.push_back(
        ul_user_mse_matrix(init.state, ch, layout, c.noise_variance, k));
  WeightState ws = init.weights;
  const std::vector<double> rates = outer_update(ws, e_ul, c);

  // ln det W_k = -ln det E_k
  for (int k = 0; k < 3; ++k) {
    const double want = -CholeskyLLT(e_ul[size_t(k)]).log_det();
    CHECK(rates[size_t(k)] == doctest::Approx(want).epsilon(1e-10));
  }
  // t is the worst ratio against the previous targets (all ones here)
  double tmin = rates[0];
  for (double r : rates) tmin = std::min(tmin, r);
  CHECK(ws.t == doctest::Approx(tmin));
  // xi_k = d_k for every user attaining the minimum; >= d_k otherwise
  for (int k = 0; k < 3; ++k) {
    CHECK(ws.rate_targets[size_t(k)] == doctest::Approx(ws.t));
    CHECK(ws.xi[size_t(k)] >= 2.0 - 1e-12);
    if (rates[size_t(k)] == tmin)
      CHECK(ws.xi[size_t(k)] == doctest::Approx(2.0));
    CHECK(max_abs_diff(ws.w[size_t(k)] * e_ul[size_t(k)],
                       CMat::identity(2)) < 1e-9);
  }
}

TEST_CASE("balance_rates solves the scalar closed-form case") {
  // K = 1, M = N = d = 1, h = 1, s2 = 1, P = 10: rate ln(11), t -> 1
  SystemConfig c = make_config(1, 1, 1, 1, 10.0, 1.0);
  const ChannelSet ch = make_channel_set({CMat::identity(1)});
  const BalancerReport rep = balance_rates(c, ch, BalancerParams{});
  CHECK(rep.converged);
  CHECK(rep.rates[0] == doctest::Approx(std::log(11.0)).epsilon(1e-9));
  CHECK(std::abs(rep.t_trace.back() - 1.0) <= 1e-4);
  CHECK(rep.balanced_level == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("balance_rates equalizes rates under equal priorities") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  const ChannelSet ch = generate_structured_channel(c, 0.3, 12);
  const BalancerReport rep = balance_rates(c, ch, BalancerParams{});
  CHECK(rep.converged);
  const double rmin = *std::min_element(rep.rates.begin(), rep.rates.end());
  const double rmax = *std::max_element(rep.rates.begin(), rep.rates.end());
  CHECK((rmax - rmin) / rmin < 0.01);

  // scale factor settles at 1 and the balanced level at 1
  CHECK(std::abs(rep.t_trace.back() - 1.0) <= 1e-4);
  CHECK(rep.balanced_level == doctest::Approx(1.0).epsilon(1e-3));
  // t >= 1 from the third outer iteration on
  for (size_t m = 2; m < rep.t_trace.size(); ++m)
    CHECK(rep.t_trace[m] >= 1.0 - 1e-9);
  // inner levels never increase within an outer round
  for (const auto& deltas : rep.delta_trace)
    for (size_t n = 1; n < deltas.size(); ++n)
      CHECK(deltas[n] <= deltas[n - 1] + 1e-9);
}

TEST_CASE("priorities steer the rate split") {
  SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  c.rate_priorities = {2.0, 1.0, 1.0};
  const ChannelSet ch = generate_structured_channel(c, 0.3, 13);
  const BalancerReport rep = balance_rates(c, ch, BalancerParams{});
  CHECK(rep.converged);
  CHECK(rep.rates[0] / rep.rates[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(rep.rates[0] / rep.rates[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("converged reports balance the ratios to the common level") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 15.0));
  for (std::uint64_t seed : {21, 22, 23}) {
    const ChannelSet ch = generate_structured_channel(c, 0.3, seed);
    const BalancerReport rep = balance_rates(c, ch, BalancerParams{});
    REQUIRE(rep.converged);
    // r_k / r_k^o spread within 1e-3 of the common value
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 3; ++k) {
      const double ratio = rep.rates[size_t(k)] / c.rate_priorities[size_t(k)];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK((hi - lo) / lo <= 1e-3);
    // and the ln det route agrees with the direct rates at convergence
    const std::vector<double>& lndet = rep.rate_trace.back();
    for (int k = 0; k < 3; ++k)
      CHECK(lndet[size_t(k)] ==
            doctest::Approx(rep.rates[size_t(k)]).epsilon(1e-3));
  }
}

TEST_CASE("single-loop variant (n_max = 1) still converges") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  const ChannelSet ch = generate_structured_channel(c, 0.3, 31);
  BalancerParams p;
  p.n_max = 1;
  p.m_max = 100;
  const BalancerReport rep = balance_rates(c, ch, p);
  CHECK(rep.converged);
  CHECK(std::abs(rep.t_trace.back() - 1.0) <= 1e-4);
}

TEST_CASE("unweighted baseline balances the per-user mean MSE") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 10.0));
  const StreamLayout layout(c);
  const ChannelSet ch = generate_structured_channel(c, 0.3, 41);
  const BalancerReport rep = balance_mse_unweighted(c, ch, BalancerParams{});
  CHECK(rep.converged);
  double ratio0 = -1.0;
  for (int k = 0; k < 3; ++k) {
    const CMat e = ul_user_mse_matrix(rep.final_state, ch, layout,
                                      c.noise_variance, k);
    double tr = 0.0;
    for (int s = 0; s < 2; ++s) tr += e(s, s).real();
    const double ratio = tr / 2.0;
    if (k == 0)
      ratio0 = ratio;
    else
      CHECK(std::abs(ratio - ratio0) < 1e-6 * ratio0);
  }
}

TEST_CASE("weighted balancing beats the unweighted baseline on min-rate") {
  const SystemConfig c = make_config(6, 3, 2, 2, 1.0, snr_sigma2(1.0, 15.0));
  double weighted = 0.0, unweighted = 0.0;
  int completed = 0;
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const ChannelSet ch = generate_structured_channel(c, 0.3, seed);
    const BalancerReport a = balance_rates(c, ch, BalancerParams{});
    const BalancerReport b = balance_mse_unweighted(c, ch, BalancerParams{});
    if (!a.converged || !b.converged) continue;
    weighted += *std::min_element(a.rates.begin(), a.rates.end());
    unweighted += *std::min_element(b.rates.begin(), b.rates.end());
    ++completed;
  }
  REQUIRE(completed >= 25);
  CHECK(weighted > unweighted);
}

TEST_CASE("single-user single-stream: baseline and weighted agree") {
  SystemConfig c = make_config(2, 1, 1, 1, 2.0, 0.5);
  const ChannelSet ch = generate_iid_channel(c, 51);
  const BalancerReport a = balance_rates(c, ch, BalancerParams{});
  const BalancerReport b = balance_mse_unweighted(c, ch, BalancerParams{});
  CHECK(a.rates[0] == doctest::Approx(b.rates[0]).epsilon(1e-6));
}

TEST_CASE("parameter validation") {
  BalancerParams p;
  p.n_max = 0;
  CHECK_THROWS_AS(validate_params(p), Error);
  p = BalancerParams{};
  p.outer_tol = 0.0;
  CHECK_THROWS_AS(validate_params(p), Error);
}
