// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "ratebal/serialize.hpp"
#include "ratebal/simulator.hpp"
#include "test_support.hpp"

using namespace ratebal;
using testing::make_config;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.config = make_config(6, 3, 2, 2);
  spec.channel_model = ChannelModel::structured;
  spec.alpha = 0.3;
  spec.snr_grid_db = {10.0};
  spec.num_trials = 4;
  spec.base_seed = 7;
  spec.threads = 1;
  return spec;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("both methods consume the identical channel draw") {
  ExperimentSpec spec = small_spec();
  spec.num_trials = 1;
  const ExperimentResult result = run_experiment(spec);
  REQUIRE(result.records.size() == 2);

  // reproduce the records by hand from the shared channel
  SystemConfig cfg = spec.config;
  cfg.noise_variance = cfg.max_power / std::pow(10.0, 1.0);
  const ChannelSet ch = generate_structured_channel(cfg, 0.3, spec.base_seed);
  const BalancerReport a = balance_rates(cfg, ch, spec.params);
  const BalancerReport b = balance_mse_unweighted(cfg, ch, spec.params);
  CHECK(result.records[0].rates == a.rates);
  CHECK(result.records[1].rates == b.rates);
}

TEST_CASE("experiments are bit-deterministic across reruns") {
  const ExperimentSpec spec = small_spec();
  const ExperimentResult a = run_experiment(spec);
  const ExperimentResult b = run_experiment(spec);
  CHECK(result_to_json(a).dump() == result_to_json(b).dump());
}

TEST_CASE("worker count does not change the records") {
  ExperimentSpec spec = small_spec();
  const ExperimentResult a = run_experiment(spec);
  spec.threads = 3;
  const ExperimentResult b = run_experiment(spec);
  spec.threads = 0;  // auto
  const ExperimentResult c = run_experiment(spec);
  CHECK(result_to_json(a).at("records").dump() ==
        result_to_json(b).at("records").dump());
  CHECK(result_to_json(a).at("records").dump() ==
        result_to_json(c).at("records").dump());
}

TEST_CASE("adding trials never changes earlier rows") {
  ExperimentSpec spec = small_spec();
  spec.num_trials = 2;
  const ExperimentResult a = run_experiment(spec);
  spec.num_trials = 4;
  const ExperimentResult b = run_experiment(spec);
  const size_t per_trial = spec.snr_grid_db.size() * spec.methods.size();
  for (size_t i = 0; i < 2 * per_trial; ++i) {
    CHECK(a.records[i].trial == b.records[i].trial);
    CHECK(a.records[i].rates == b.records[i].rates);
  }
}

TEST_CASE("aggregates equal the mean of the raw records") {
  const ExperimentSpec spec = small_spec();
  const ExperimentResult result = run_experiment(spec);
  for (const AggregateRow& row : result.rows) {
    double min_sum = 0.0;
    int n = 0;
    for (const TrialRecord& rec : result.records) {
      if (rec.method != row.method || rec.snr_db != row.snr_db || rec.failed)
        continue;
      min_sum += rec.min_rate;
      ++n;
    }
    REQUIRE(n == row.trials);
    CHECK(std::abs(row.mean_min_rate - min_sum / n) < 1e-12);
  }
}

TEST_CASE("mean min-rate grows with SNR") {
  ExperimentSpec spec = small_spec();
  spec.num_trials = 200;
  spec.snr_grid_db = {0.0, 10.0, 20.0};
  const ExperimentResult result = run_experiment(spec);
  for (Method method : spec.methods) {
    double prev = -1.0;
    for (double snr : spec.snr_grid_db) {
      for (const AggregateRow& row : result.rows) {
        if (row.method != method || row.snr_db != snr) continue;
        CHECK(row.mean_min_rate > prev);
        prev = row.mean_min_rate;
      }
    }
  }
}

TEST_CASE("gain_ratio arithmetic and error paths") {
  ExperimentResult result;
  result.spec = small_spec();
  AggregateRow w;
  w.method = Method::weighted_rate;
  w.snr_db = 15.0;
  w.mean_min_rate = 1.18;
  AggregateRow u = w;
  u.method = Method::unweighted_mse;
  u.mean_min_rate = 1.0;
  result.rows = {w, u};
  CHECK(gain_ratio(result, 15.0) == doctest::Approx(1.18));
  CHECK_THROWS_AS(gain_ratio(result, 10.0), Error);

  // identical aggregates compare to exactly 1
  u.mean_min_rate = 1.18;
  result.rows = {w, u};
  CHECK(gain_ratio(result, 15.0) == 1.0);
}

TEST_CASE("emit csv shape and json round-trip") {
  ExperimentSpec spec = small_spec();
  spec.num_trials = 2;
  spec.snr_grid_db = {5.0, 10.0};
  const ExperimentResult result = run_experiment(spec);

  TempFile csv("ratebal_test.csv");
  emit_results(result, EmitFormat::csv, csv.path);
  std::istringstream lines(read_file(csv.path));
  std::string line;
  int count = 0;
  std::getline(lines, line);
  CHECK(line ==
        "method,snr_db,mean_min_rate,mean_sum_rate,user_rate_1,user_rate_2,"
        "user_rate_3,failures,mean_outer_iters");
  while (std::getline(lines, line))
    if (!line.empty()) ++count;
  CHECK(count == int(spec.methods.size() * spec.snr_grid_db.size()));

  TempFile jsn("ratebal_test.json");
  emit_results(result, EmitFormat::json, jsn.path);
  const ExperimentResult parsed =
      result_from_json(json::parse(read_file(jsn.path)));
  CHECK(result_to_json(parsed).dump() == result_to_json(result).dump());
}

TEST_CASE("empty result emits a header-only csv") {
  ExperimentResult result;
  result.spec = small_spec();
  TempFile csv("ratebal_empty.csv");
  emit_results(result, EmitFormat::csv, csv.path);
  std::istringstream lines(read_file(csv.path));
  std::string line;
  int count = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++count;
  CHECK(count == 1);
}

TEST_CASE("channel sets round-trip through the replay format") {
  const SystemConfig c = make_config(6, 3, 2, 2);
  const ChannelSet ch = generate_structured_channel(c, 0.3, 99);
  const ChannelSet back = channel_from_json(channel_to_json(ch));
  CHECK(max_abs_diff(ch.stacked, back.stacked) == 0.0);
  for (int k = 0; k < 3; ++k)
    CHECK(max_abs_diff(ch.per_user[size_t(k)], back.per_user[size_t(k)]) == 0.0);
}

TEST_CASE("spec json round-trip preserves the fields") {
  ExperimentSpec spec = small_spec();
  spec.methods = {Method::weighted_rate};
  spec.params.n_max = 1;
  spec.params.outer_tol = 3e-5;
  spec.config.rate_priorities = {2.0, 1.0, 1.0};
  const ExperimentSpec back = spec_from_json(spec_to_json(spec));
  CHECK(spec_to_json(back).dump() == spec_to_json(spec).dump());
}

TEST_CASE("invalid specs are rejected") {
  ExperimentSpec spec = small_spec();
  spec.num_trials = 0;
  CHECK_THROWS_AS(run_experiment(spec), Error);
  spec = small_spec();
  spec.snr_grid_db.clear();
  CHECK_THROWS_AS(run_experiment(spec), Error);
  spec = small_spec();
  spec.methods.clear();
  CHECK_THROWS_AS(run_experiment(spec), Error);
}
