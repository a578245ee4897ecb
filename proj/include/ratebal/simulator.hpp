// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ratebal/balancer.hpp"

namespace ratebal {

enum class ChannelModel { structured, iid };
enum class Method { weighted_rate, unweighted_mse };

/// Monte Carlo experiment description. SNR is P_max / sigma_n^2; the config's
/// noise_variance field is ignored here and derived per grid point.
struct ExperimentSpec {
  SystemConfig config;
  ChannelModel channel_model = ChannelModel::structured;
  double alpha = 0.3;  ///< structured-model decay parameter
  std::vector<double> snr_grid_db;
  int num_trials = 200;
  std::uint64_t base_seed = 1;
  BalancerParams params;
  std::vector<Method> methods = {Method::weighted_rate, Method::unweighted_mse};
  int threads = 1;  ///< 0 = hardware concurrency

  void validate() const;
};

/// One (trial, snr, method) outcome. Failed trials carry the error text and
/// are excluded from the aggregates.
struct TrialRecord {
  int trial = 0;
  Method method = Method::weighted_rate;
  double snr_db = 0.0;
  bool failed = false;
  std::string error;
  std::vector<double> rates;
  double min_rate = 0.0;
  double sum_rate = 0.0;
  int outer_iters = 0;
  int inner_total = 0;
  double final_t = 0.0;
  double balanced_level = 0.0;
  std::vector<double> t_trace;
};

struct AggregateRow {
  Method method = Method::weighted_rate;
  double snr_db = 0.0;
  double mean_min_rate = 0.0;
  double mean_sum_rate = 0.0;
  std::vector<double> mean_user_rates;
  int failures = 0;
  double mean_outer_iters = 0.0;
  int trials = 0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<TrialRecord> records;  ///< trial-major, then snr, then method
  std::vector<AggregateRow> rows;    ///< per (method, snr)
};

/// Runs the full grid. Trial i draws one channel from seed base_seed ^ i and
/// reuses it for every method and SNR point. Deterministic given the spec,
/// independent of the worker count. Throws Errc::experiment_failure when
/// more than half of all runs fail.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Ratio of mean minimum rates, weighted over unweighted, at one SNR point.
double gain_ratio(const ExperimentResult& result, double snr_db);

enum class EmitFormat { csv, json };

/// Writes the result table (csv) or the full structure (json) to path.
void emit_results(const ExperimentResult& result, EmitFormat format,
                  const std::string& path);

}  // namespace ratebal
