// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors
//
// Command line front end: `run` sweeps a Monte Carlo experiment grid,
// `gain` reads a result file and prints the weighted/unweighted min-rate
// ratio, `trace` dumps one trial's convergence trace as JSON.

#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "ratebal/serialize.hpp"
#include "ratebal/simd/kernels.hpp"

namespace {

using namespace ratebal;

struct CommonOpts {
  int users = 3;
  int tx_antennas = 6;
  std::vector<int> rx_antennas = {2};
  std::vector<int> streams = {2};
  std::vector<double> priorities;
  std::string channel = "structured";
  double alpha = 0.3;
  std::uint64_t seed = 1;
  int n_max = 20;
  int m_max = 100;
  double inner_tol = 1e-6;
  double outer_tol = 1e-4;
  std::string spec_file;
};

// Broadcasts a single value to all users, checks explicit per-user lists.
template <typename T>
std::vector<T> per_user(std::vector<T> values, int users, const char* what) {
  if (int(values.size()) == 1) return std::vector<T>(size_t(users), values[0]);
  if (int(values.size()) != users)
    fail(Errc::invalid_config,
         std::string(what) + " needs 1 or num_users values");
  return values;
}

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--spec", o.spec_file,
                  "experiment spec JSON; flags given on the command line "
                  "override its fields");
  cmd->add_option("--users", o.users, "number of users K");
  cmd->add_option("--tx-antennas", o.tx_antennas, "BS transmit antennas M");
  cmd->add_option("--rx-antennas", o.rx_antennas,
                  "receive antennas per user (single value or list)")
      ->delimiter(',');
  cmd->add_option("--streams", o.streams,
                  "streams per user (single value or list)")
      ->delimiter(',');
  cmd->add_option("--priorities", o.priorities,
                  "rate priorities r_k (default all 1)")
      ->delimiter(',');
  cmd->add_option("--channel", o.channel, "channel model: structured | iid")
      ->check(CLI::IsMember({"structured", "iid"}));
  cmd->add_option("--alpha", o.alpha, "structured-model decay in (0, 1]");
  cmd->add_option("--seed", o.seed, "base RNG seed");
  cmd->add_option("--n-max", o.n_max, "inner iteration cap");
  cmd->add_option("--m-max", o.m_max, "outer iteration cap");
  cmd->add_option("--inner-tol", o.inner_tol, "inner stop tolerance");
  cmd->add_option("--outer-tol", o.outer_tol, "outer stop tolerance on |t-1|");
}

ExperimentSpec build_spec(const CommonOpts& o, const CLI::App* cmd) {
  ExperimentSpec spec;
  if (!o.spec_file.empty())
    spec = spec_from_json(json::parse(read_file(o.spec_file)));

  auto given = [cmd](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (o.spec_file.empty() || given("--users"))
    spec.config.num_users = o.users;
  if (o.spec_file.empty() || given("--tx-antennas"))
    spec.config.num_tx_antennas = o.tx_antennas;
  if (o.spec_file.empty() || given("--rx-antennas"))
    spec.config.rx_antennas =
        per_user(o.rx_antennas, spec.config.num_users, "--rx-antennas");
  if (o.spec_file.empty() || given("--streams"))
    spec.config.streams =
        per_user(o.streams, spec.config.num_users, "--streams");
  if (o.spec_file.empty() || given("--priorities")) {
    spec.config.rate_priorities =
        o.priorities.empty()
            ? std::vector<double>(size_t(spec.config.num_users), 1.0)
            : per_user(o.priorities, spec.config.num_users, "--priorities");
  }
  if (o.spec_file.empty() || given("--channel"))
    spec.channel_model = channel_model_from_name(o.channel);
  if (o.spec_file.empty() || given("--alpha")) spec.alpha = o.alpha;
  if (o.spec_file.empty() || given("--seed")) spec.base_seed = o.seed;
  if (o.spec_file.empty() || given("--n-max")) spec.params.n_max = o.n_max;
  if (o.spec_file.empty() || given("--m-max")) spec.params.m_max = o.m_max;
  if (o.spec_file.empty() || given("--inner-tol"))
    spec.params.inner_tol = o.inner_tol;
  if (o.spec_file.empty() || given("--outer-tol"))
    spec.params.outer_tol = o.outer_tol;
  if (spec.config.rate_priorities.empty())
    spec.config.rate_priorities.assign(size_t(spec.config.num_users), 1.0);
  return spec;
}

int cmd_run(const CommonOpts& o, const CLI::App* cmd,
            const std::vector<double>& snr, int trials,
            const std::vector<std::string>& methods, int threads,
            const std::string& out, const std::string& format) {
  ExperimentSpec spec = build_spec(o, cmd);
  if (cmd->count("--snr") > 0 || spec.snr_grid_db.empty())
    spec.snr_grid_db = snr;
  if (cmd->count("--trials") > 0 || o.spec_file.empty())
    spec.num_trials = trials;
  if (cmd->count("--methods") > 0 || o.spec_file.empty()) {
    spec.methods.clear();
    for (const std::string& m : methods)
      spec.methods.push_back(method_from_name(m));
  }
  if (cmd->count("--threads") > 0 || o.spec_file.empty())
    spec.threads = threads;

  const ExperimentResult result = run_experiment(spec);
  emit_results(result, format == "csv" ? EmitFormat::csv : EmitFormat::json,
               out);
  for (const AggregateRow& row : result.rows)
    std::printf("%-15s snr %6.1f dB  min-rate %.6f  sum-rate %.6f  "
                "failures %d/%d\n",
                method_name(row.method).c_str(), row.snr_db, row.mean_min_rate,
                row.mean_sum_rate, row.failures, row.trials + row.failures);
  std::printf("results written to %s\n", out.c_str());
  return 0;
}

int cmd_gain(const std::string& file, double snr) {
  const ExperimentResult result =
      result_from_json(json::parse(read_file(file)));
  std::printf("%.6f\n", gain_ratio(result, snr));
  return 0;
}

int cmd_trace(const CommonOpts& o, const CLI::App* cmd, int trial, double snr,
              const std::string& method, const std::string& out,
              const std::string& dump_channel) {
  ExperimentSpec spec = build_spec(o, cmd);
  SystemConfig cfg = spec.config;
  cfg.noise_variance = cfg.max_power / std::pow(10.0, snr / 10.0);
  const std::uint64_t seed = spec.base_seed ^ std::uint64_t(trial);
  const ChannelSet channel =
      spec.channel_model == ChannelModel::structured
          ? generate_structured_channel(cfg, spec.alpha, seed)
          : generate_iid_channel(cfg, seed);
  if (!dump_channel.empty())
    write_file(dump_channel, channel_to_json(channel).dump(2) + "\n");

  const BalancerReport report =
      method_from_name(method) == Method::weighted_rate
          ? balance_rates(cfg, channel, spec.params)
          : balance_mse_unweighted(cfg, channel, spec.params);
  json j = report_to_json(report);
  j["trial"] = trial;
  j["snr_db"] = snr;
  j["method"] = method;
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_file(out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-min user rate balancing simulator for the MU-MIMO downlink"};
  app.require_subcommand(1);

  CommonOpts run_opts, trace_opts;

  auto* run = app.add_subcommand("run", "run a Monte Carlo experiment grid");
  add_common_flags(run, run_opts);
  std::vector<double> snr = {10.0};
  int trials = 200;
  std::vector<std::string> methods = {"weighted_rate", "unweighted_mse"};
  int threads = 1;
  std::string out = "results.json", format = "json";
  run->add_option("--snr", snr, "SNR grid in dB")->delimiter(',');
  run->add_option("--trials", trials, "number of channel realizations");
  run->add_option("--methods", methods,
                  "methods: weighted_rate | unweighted_mse")
      ->delimiter(',');
  run->add_option("--threads", threads, "worker threads (0 = auto)");
  run->add_option("--out", out, "output path");
  run->add_option("--format", format, "output format: json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* gain = app.add_subcommand(
      "gain", "weighted/unweighted min-rate ratio from a result file");
  std::string gain_file;
  double gain_snr = 10.0;
  gain->add_option("file", gain_file, "result JSON from `run`")->required();
  gain->add_option("--snr", gain_snr, "SNR point in dB");

  auto* trace = app.add_subcommand("trace", "dump one trial's convergence trace");
  add_common_flags(trace, trace_opts);
  int trace_trial = 0;
  double trace_snr = 10.0;
  std::string trace_method = "weighted_rate", trace_out, trace_dump_channel;
  trace->add_option("--trial", trace_trial, "trial index");
  trace->add_option("--snr", trace_snr, "SNR in dB");
  trace->add_option("--method", trace_method,
                    "weighted_rate | unweighted_mse");
  trace->add_option("--out", trace_out, "output path (default stdout)");
  trace->add_option("--dump-channel", trace_dump_channel,
                    "also write the channel realization to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(run_opts, run, snr, trials, methods, threads, out, format);
    if (gain->parsed()) return cmd_gain(gain_file, gain_snr);
    if (trace->parsed())
      return cmd_trace(trace_opts, trace, trace_trial, trace_snr, trace_method,
                       trace_out, trace_dump_channel);
  } catch (const ratebal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ratebal::Errc::experiment_failure ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
