// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the ratebal authors

#pragma once

#include <string>

#include <json.hpp>

#include "ratebal/balancer.hpp"
#include "ratebal/simulator.hpp"

namespace ratebal {

using json = nlohmann::json;

// Channel test-vector format: one entry per user with shape and
// column-major interleaved re/im doubles.
json channel_to_json(const ChannelSet& channel);
ChannelSet channel_from_json(const json& j);

json config_to_json(const SystemConfig& config);
SystemConfig config_from_json(const json& j);

json params_to_json(const BalancerParams& params);
BalancerParams params_from_json(const json& j);

json report_to_json(const BalancerReport& report);

json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const json& j);

json result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const json& j);

std::string method_name(Method m);
Method method_from_name(const std::string& name);

std::string channel_model_name(ChannelModel m);
ChannelModel channel_model_from_name(const std::string& name);

/// Reads a whole file; Errc::io_error on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace ratebal
