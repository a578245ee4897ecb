// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#include "ratebal/serialize.hpp"

#include <fstream>
#include <sstream>

namespace ratebal {

std::string method_name(Method m) {
  return m == Method::weighted_rate ? "weighted_rate" : "unweighted_mse";
}

Method method_from_name(const std::string& name) {
  if (name == "weighted_rate" || name == "weighted") return Method::weighted_rate;
  if (name == "unweighted_mse" || name == "unweighted")
    return Method::unweighted_mse;
  fail(Errc::spec_error, "unknown method: " + name);
}

std::string channel_model_name(ChannelModel m) {
  return m == ChannelModel::structured ? "structured" : "iid";
}

ChannelModel channel_model_from_name(const std::string& name) {
  if (name == "structured") return ChannelModel::structured;
  if (name == "iid") return ChannelModel::iid;
  fail(Errc::spec_error, "unknown channel model: " + name);
}

json channel_to_json(const ChannelSet& channel) {
  json users = json::array();
  for (size_t k = 0; k < channel.per_user.size(); ++k) {
    const CMat& h = channel.per_user[k];
    json data = json::array();
    for (int j = 0; j < h.cols(); ++j)
      for (int i = 0; i < h.rows(); ++i) {
        data.push_back(h(i, j).real());
        data.push_back(h(i, j).imag());
      }
    users.push_back({{"user", k},
                     {"rows", h.rows()},
                     {"cols", h.cols()},
                     {"data", std::move(data)}});
  }
  return json{{"users", std::move(users)}};
}

ChannelSet channel_from_json(const json& j) {
  std::vector<CMat> per_user;
  for (const json& u : j.at("users")) {
    const int rows = u.at("rows").get<int>();
    const int cols = u.at("cols").get<int>();
    const json& data = u.at("data");
    if (int(data.size()) != 2 * rows * cols)
      fail(Errc::io_error, "channel data length mismatch");
    CMat h(rows, cols);
    size_t idx = 0;
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) {
        const double re = data[idx++].get<double>();
        const double im = data[idx++].get<double>();
        h(r, c) = cxd(re, im);
      }
    per_user.push_back(std::move(h));
  }
  return make_channel_set(std::move(per_user));
}

json config_to_json(const SystemConfig& config) {
  return json{{"tx_antennas", config.num_tx_antennas},
              {"users", config.num_users},
              {"rx_antennas", config.rx_antennas},
              {"streams", config.streams},
              {"max_power", config.max_power},
              {"noise_variance", config.noise_variance},
              {"priorities", config.rate_priorities}};
}

SystemConfig config_from_json(const json& j) {
  SystemConfig c;
  c.num_tx_antennas = j.at("tx_antennas").get<int>();
  c.num_users = j.at("users").get<int>();
  c.rx_antennas = j.at("rx_antennas").get<std::vector<int>>();
  c.streams = j.at("streams").get<std::vector<int>>();
  c.max_power = j.value("max_power", 1.0);
  c.noise_variance = j.value("noise_variance", 1.0);
  if (j.contains("priorities"))
    c.rate_priorities = j.at("priorities").get<std::vector<double>>();
  else
    c.rate_priorities.assign(size_t(c.num_users), 1.0);
  return c;
}

json params_to_json(const BalancerParams& params) {
  return json{{"n_max", params.n_max},
              {"m_max", params.m_max},
              {"inner_tol", params.inner_tol},
              {"outer_tol", params.outer_tol}};
}

BalancerParams params_from_json(const json& j) {
  BalancerParams p;
  p.n_max = j.value("n_max", p.n_max);
  p.m_max = j.value("m_max", p.m_max);
  p.inner_tol = j.value("inner_tol", p.inner_tol);
  p.outer_tol = j.value("outer_tol", p.outer_tol);
  return p;
}

json report_to_json(const BalancerReport& report) {
  return json{{"rates", report.rates},
              {"balanced_level", report.balanced_level},
              {"t_trace", report.t_trace},
              {"rate_trace", report.rate_trace},
              {"rate_trace_dl", report.rate_trace_dl},
              {"delta_trace", report.delta_trace},
              {"inner_iterations_used", report.inner_iterations_used},
              {"outer_iterations", report.outer_iterations},
              {"converged", report.converged},
              {"dl_power", report.final_state.dl_power},
              {"ul_power", report.final_state.ul_power},
              {"beta", report.final_state.beta},
              {"xi", report.final_weights.xi},
              {"rate_targets", report.final_weights.rate_targets},
              {"t", report.final_weights.t}};
}

json spec_to_json(const ExperimentSpec& spec) {
  json methods = json::array();
  for (Method m : spec.methods) methods.push_back(method_name(m));
  return json{{"config", config_to_json(spec.config)},
              {"channel_model", channel_model_name(spec.channel_model)},
              {"alpha", spec.alpha},
              {"snr_grid_db", spec.snr_grid_db},
              {"num_trials", spec.num_trials},
              {"base_seed", spec.base_seed},
              {"params", params_to_json(spec.params)},
              {"methods", std::move(methods)},
              {"threads", spec.threads}};
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec s;
  s.config = config_from_json(j.at("config"));
  s.channel_model =
      channel_model_from_name(j.value("channel_model", "structured"));
  s.alpha = j.value("alpha", 0.3);
  s.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
  s.num_trials = j.value("num_trials", 200);
  s.base_seed = j.value("base_seed", std::uint64_t(1));
  if (j.contains("params")) s.params = params_from_json(j.at("params"));
  if (j.contains("methods")) {
    s.methods.clear();
    for (const json& m : j.at("methods"))
      s.methods.push_back(method_from_name(m.get<std::string>()));
  }
  s.threads = j.value("threads", 1);
  return s;
}

namespace {

json record_to_json(const TrialRecord& r) {
  return json{{"trial", r.trial},
              {"method", method_name(r.method)},
              {"snr_db", r.snr_db},
              {"failed", r.failed},
              {"error", r.error},
              {"rates", r.rates},
              {"min_rate", r.min_rate},
              {"sum_rate", r.sum_rate},
              {"outer_iters", r.outer_iters},
              {"inner_total", r.inner_total},
              {"final_t", r.final_t},
              {"balanced_level", r.balanced_level},
              {"t_trace", r.t_trace}};
}

TrialRecord record_from_json(const json& j) {
  TrialRecord r;
  r.trial = j.at("trial").get<int>();
  r.method = method_from_name(j.at("method").get<std::string>());
  r.snr_db = j.at("snr_db").get<double>();
  r.failed = j.at("failed").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.rates = j.at("rates").get<std::vector<double>>();
  r.min_rate = j.at("min_rate").get<double>();
  r.sum_rate = j.at("sum_rate").get<double>();
  r.outer_iters = j.at("outer_iters").get<int>();
  r.inner_total = j.at("inner_total").get<int>();
  r.final_t = j.at("final_t").get<double>();
  r.balanced_level = j.at("balanced_level").get<double>();
  r.t_trace = j.at("t_trace").get<std::vector<double>>();
  return r;
}

json row_to_json(const AggregateRow& r) {
  return json{{"method", method_name(r.method)},
              {"snr_db", r.snr_db},
              {"mean_min_rate", r.mean_min_rate},
              {"mean_sum_rate", r.mean_sum_rate},
              {"mean_user_rates", r.mean_user_rates},
              {"failures", r.failures},
              {"mean_outer_iters", r.mean_outer_iters},
              {"trials", r.trials}};
}

AggregateRow row_from_json(const json& j) {
  AggregateRow r;
  r.method = method_from_name(j.at("method").get<std::string>());
  r.snr_db = j.at("snr_db").get<double>();
  r.mean_min_rate = j.at("mean_min_rate").get<double>();
  r.mean_sum_rate = j.at("mean_sum_rate").get<double>();
  r.mean_user_rates = j.at("mean_user_rates").get<std::vector<double>>();
  r.failures = j.at("failures").get<int>();
  r.mean_outer_iters = j.at("mean_outer_iters").get<double>();
  r.trials = j.at("trials").get<int>();
  return r;
}

}  // namespace

json result_to_json(const ExperimentResult& result) {
  json records = json::array();
  for (const TrialRecord& r : result.records) records.push_back(record_to_json(r));
  json rows = json::array();
  for (const AggregateRow& r : result.rows) rows.push_back(row_to_json(r));
  return json{{"spec", spec_to_json(result.spec)},
              {"rows", std::move(rows)},
              {"records", std::move(records)}};
}

ExperimentResult result_from_json(const json& j) {
  ExperimentResult r;
  r.spec = spec_from_json(j.at("spec"));
  for (const json& rec : j.at("records"))
    r.records.push_back(record_from_json(rec));
  for (const json& row : j.at("rows")) r.rows.push_back(row_from_json(row));
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(Errc::io_error, "read failed: " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open for writing: " + path);
  out << contents;
  out.flush();
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

}  // namespace ratebal
