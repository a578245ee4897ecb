// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "ratebal/serialize.hpp"

namespace ratebal {

void ExperimentSpec::validate() const {
  config.validate();
  validate_params(params);
  if (num_trials < 1) fail(Errc::invalid_config, "num_trials must be >= 1");
  if (snr_grid_db.empty()) fail(Errc::invalid_config, "snr grid is empty");
  if (methods.empty()) fail(Errc::invalid_config, "no methods selected");
  if (threads < 0) fail(Errc::invalid_config, "threads must be >= 0");
  if (channel_model == ChannelModel::structured &&
      (!(alpha > 0.0) || alpha > 1.0))
    fail(Errc::invalid_config, "alpha must lie in (0, 1]");
}

namespace {

TrialRecord run_single(const ExperimentSpec& spec, const ChannelSet& channel,
                       int trial, double snr_db, Method method) {
  TrialRecord rec;
  rec.trial = trial;
  rec.method = method;
  rec.snr_db = snr_db;
  SystemConfig cfg = spec.config;
  cfg.noise_variance = cfg.max_power / std::pow(10.0, snr_db / 10.0);
  try {
    const BalancerReport report =
        (method == Method::weighted_rate)
            ? balance_rates(cfg, channel, spec.params)
            : balance_mse_unweighted(cfg, channel, spec.params);
    rec.rates = report.rates;
    rec.min_rate = *std::min_element(rec.rates.begin(), rec.rates.end());
    rec.sum_rate = 0.0;
    for (double r : rec.rates) rec.sum_rate += r;
    rec.outer_iters = report.outer_iterations;
    rec.inner_total = 0;
    for (int n : report.inner_iterations_used) rec.inner_total += n;
    rec.final_t = report.final_weights.t;
    rec.balanced_level = report.balanced_level;
    rec.t_trace = report.t_trace;
    if (!report.converged) {
      rec.failed = true;
      rec.error = "did not converge within iteration caps";
    }
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

// All records of one trial, in (snr, method) order.
std::vector<TrialRecord> run_trial(const ExperimentSpec& spec, int trial) {
  const std::uint64_t seed =
      spec.base_seed ^ static_cast<std::uint64_t>(trial);
  const ChannelSet channel =
      (spec.channel_model == ChannelModel::structured)
          ? generate_structured_channel(spec.config, spec.alpha, seed)
          : generate_iid_channel(spec.config, seed);
  std::vector<TrialRecord> out;
  out.reserve(spec.snr_grid_db.size() * spec.methods.size());
  for (double snr : spec.snr_grid_db)
    for (Method method : spec.methods)
      out.push_back(run_single(spec, channel, trial, snr, method));
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;

  std::vector<std::vector<TrialRecord>> per_trial(size_t(spec.num_trials));
  unsigned workers = spec.threads == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : unsigned(spec.threads);
  workers = std::min<unsigned>(workers, unsigned(spec.num_trials));
  if (workers <= 1) {
    for (int i = 0; i < spec.num_trials; ++i) per_trial[size_t(i)] = run_trial(spec, i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = int(w); i < spec.num_trials; i += int(workers))
          per_trial[size_t(i)] = run_trial(spec, i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // deterministic order: trial-major, then snr, then method
  for (auto& trial_records : per_trial)
    for (TrialRecord& rec : trial_records)
      result.records.push_back(std::move(rec));

  // aggregate rows per (method, snr), snr-major to match the grid
  std::size_t total = 0, failed = 0;
  for (Method method : spec.methods) {
    for (double snr : spec.snr_grid_db) {
      AggregateRow row;
      row.method = method;
      row.snr_db = snr;
      row.mean_user_rates.assign(size_t(spec.config.num_users), 0.0);
      for (const TrialRecord& rec : result.records) {
        if (rec.method != method || rec.snr_db != snr) continue;
        ++total;
        if (rec.failed) {
          ++row.failures;
          ++failed;
          continue;
        }
        ++row.trials;
        row.mean_min_rate += rec.min_rate;
        row.mean_sum_rate += rec.sum_rate;
        row.mean_outer_iters += rec.outer_iters;
        for (size_t k = 0; k < rec.rates.size(); ++k)
          row.mean_user_rates[k] += rec.rates[k];
      }
      if (row.trials > 0) {
        row.mean_min_rate /= row.trials;
        row.mean_sum_rate /= row.trials;
        row.mean_outer_iters /= row.trials;
        for (double& r : row.mean_user_rates) r /= row.trials;
      }
      result.rows.push_back(std::move(row));
    }
  }
  if (total > 0 && 2 * failed > total)
    fail(Errc::experiment_failure, "more than half of all runs failed");
  return result;
}

double gain_ratio(const ExperimentResult& result, double snr_db) {
  const AggregateRow* weighted = nullptr;
  const AggregateRow* unweighted = nullptr;
  for (const AggregateRow& row : result.rows) {
    if (std::abs(row.snr_db - snr_db) > 1e-9) continue;
    if (row.method == Method::weighted_rate) weighted = &row;
    if (row.method == Method::unweighted_mse) unweighted = &row;
  }
  if (weighted == nullptr || unweighted == nullptr)
    fail(Errc::spec_error, "gain_ratio: both methods required at this SNR");
  if (!(unweighted->mean_min_rate > 0.0))
    fail(Errc::spec_error, "gain_ratio: baseline mean min-rate is zero");
  return weighted->mean_min_rate / unweighted->mean_min_rate;
}

void emit_results(const ExperimentResult& result, EmitFormat format,
                  const std::string& path) {
  if (format == EmitFormat::json) {
    write_file(path, result_to_json(result).dump(2) + "\n");
    return;
  }
  std::string csv = "method,snr_db,mean_min_rate,mean_sum_rate";
  for (int k = 1; k <= result.spec.config.num_users; ++k)
    csv += ",user_rate_" + std::to_string(k);
  csv += ",failures,mean_outer_iters\n";
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  for (const AggregateRow& row : result.rows) {
    csv += method_name(row.method) + "," + fmt(row.snr_db) + "," +
           fmt(row.mean_min_rate) + "," + fmt(row.mean_sum_rate);
    for (double r : row.mean_user_rates) csv += "," + fmt(r);
    csv += "," + std::to_string(row.failures) + "," + fmt(row.mean_outer_iters);
    csv += "\n";
  }
  write_file(path, csv);
}

}  // namespace ratebal
