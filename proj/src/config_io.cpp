// Copyright 2026 The trajlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajlab/config_io.hpp"

#include <stdexcept>
#include <string>

#include "trajlab/error.hpp"
#include "trajlab/rng.hpp"

namespace trajlab
{
namespace
{

template <typename T>
void maybe(const Json & j, const char * key, T & out)
{
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception & e) {
      throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

}  // namespace

Json arch_to_json(const ArchConfig & cfg)
{
  Json j;
  j["raster_size"] = cfg.raster_size;
  j["horizon_steps"] = cfg.horizon_steps;
  j["backbones"] = cfg.backbones;
  j["hypotheses_per_head"] = cfg.hypotheses_per_head;
  j["modes"] = cfg.modes;
  j["conv_channels"] = cfg.conv_channels;
  j["head_hidden"] = cfg.head_hidden;
  j["token_dim"] = cfg.token_dim;
  j["attention_heads"] = cfg.attention_heads;
  j["id_embed_dim"] = cfg.id_embed_dim;
  j["use_backbone_id"] = cfg.use_backbone_id;
  j["activation"] = activation_name(cfg.activation);
  j["traj_scale"] = cfg.traj_scale;
  return j;
}

ArchConfig arch_from_json(const Json & j)
{
  ArchConfig cfg;
  maybe(j, "raster_size", cfg.raster_size);
  maybe(j, "horizon_steps", cfg.horizon_steps);
  maybe(j, "backbones", cfg.backbones);
  maybe(j, "hypotheses_per_head", cfg.hypotheses_per_head);
  maybe(j, "modes", cfg.modes);
  maybe(j, "conv_channels", cfg.conv_channels);
  maybe(j, "head_hidden", cfg.head_hidden);
  maybe(j, "token_dim", cfg.token_dim);
  maybe(j, "attention_heads", cfg.attention_heads);
  maybe(j, "id_embed_dim", cfg.id_embed_dim);
  maybe(j, "use_backbone_id", cfg.use_backbone_id);
  if (j.contains("activation")) {
    try {
      cfg.activation = activation_from_name(j.at("activation").get<std::string>());
    } catch (const ArgumentError & e) {
      throw ConfigError(e.what());
    }
  }
  maybe(j, "traj_scale", cfg.traj_scale);
  return cfg;
}

Json raster_to_json(const RasterConfig & cfg)
{
  Json j;
  j["size_px"] = cfg.size_px;
  j["extent_m"] = cfg.extent_m;
  j["target_offset"] = {cfg.target_offset.x, cfg.target_offset.y};
  Json colors;
  for (const auto & [kind, rgb] : cfg.color_table) {
    colors[layer_kind_name(kind)] = rgb;
  }
  j["color_table"] = std::move(colors);
  return j;
}

RasterConfig raster_from_json(const Json & j)
{
  RasterConfig cfg;
  maybe(j, "size_px", cfg.size_px);
  maybe(j, "extent_m", cfg.extent_m);
  if (j.contains("target_offset")) {
    const auto & o = j.at("target_offset");
    if (!o.is_array() || o.size() != 2) {
      throw ConfigError("target_offset must be a [x, y] pair");
    }
    cfg.target_offset = {o[0].get<double>(), o[1].get<double>()};
  }
  if (j.contains("color_table")) {
    for (const auto & [name, rgb] : j.at("color_table").items()) {
      cfg.color_table[layer_kind_from_name(name)] = rgb.get<std::array<double, 3>>();
    }
  }
  return cfg;
}

Json layer_specs_to_json(const std::vector<LayerSpec> & specs)
{
  Json j = Json::array();
  for (const LayerSpec & spec : specs) {
    Json kinds = Json::array();
    for (LayerKind k : spec.kinds) {
      kinds.push_back(layer_kind_name(k));
    }
    j.push_back(std::move(kinds));
  }
  return j;
}

std::vector<LayerSpec> layer_specs_from_json(const Json & j)
{
  std::vector<LayerSpec> specs;
  for (const auto & entry : j) {
    LayerSpec spec;
    for (const auto & name : entry) {
      spec.kinds.push_back(layer_kind_from_name(name.get<std::string>()));
    }
    spec.validate();
    specs.push_back(std::move(spec));
  }
  return specs;
}

Json gen_to_json(const GenParams & params)
{
  Json j;
  Json weights;
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    weights[family_name(kAllFamilies[i])] = params.family_weights[i];
  }
  j["family_weights"] = std::move(weights);
  j["agent_count_min"] = params.agent_count_min;
  j["agent_count_max"] = params.agent_count_max;
  j["horizon_steps"] = params.horizon_steps;
  j["frequency_hz"] = params.frequency_hz;
  j["speed_min"] = params.speed_min;
  j["speed_max"] = params.speed_max;
  j["accel_max"] = params.accel_max;
  j["lane_width"] = params.lane_width;
  j["road_half_width"] = params.road_half_width;
  j["road_length"] = params.road_length;
  return j;
}

GenParams gen_from_json(const Json & j)
{
  GenParams params;
  if (j.contains("family_weights")) {
    for (const auto & [name, w] : j.at("family_weights").items()) {
      SceneFamily f;
      try {
        f = family_from_name(name);
      } catch (const ArgumentError & e) {
        throw ConfigError(e.what());
      }
      for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
        if (kAllFamilies[i] == f) {
          params.family_weights[i] = w.get<double>();
        }
      }
    }
  }
  maybe(j, "agent_count_min", params.agent_count_min);
  maybe(j, "agent_count_max", params.agent_count_max);
  maybe(j, "horizon_steps", params.horizon_steps);
  maybe(j, "frequency_hz", params.frequency_hz);
  maybe(j, "speed_min", params.speed_min);
  maybe(j, "speed_max", params.speed_max);
  maybe(j, "accel_max", params.accel_max);
  maybe(j, "lane_width", params.lane_width);
  maybe(j, "road_half_width", params.road_half_width);
  maybe(j, "road_length", params.road_length);
  return params;
}

Json train_to_json(const TrainConfig & cfg)
{
  Json j;
  j["learning_rate"] = cfg.learning_rate;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["beta1"] = cfg.beta1;
  j["beta2"] = cfg.beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["loss_variant"] = loss_variant_name(cfg.loss_variant);
  j["squared_regression"] = cfg.squared_regression;
  j["seed"] = cfg.seed;
  j["val_fraction"] = cfg.val_fraction;
  j["select_best_val"] = cfg.select_best_val;
  j["grad_clip"] = cfg.grad_clip;
  return j;
}

TrainConfig train_from_json(const Json & j)
{
  TrainConfig cfg;
  maybe(j, "learning_rate", cfg.learning_rate);
  maybe(j, "batch_size", cfg.batch_size);
  maybe(j, "epochs", cfg.epochs);
  maybe(j, "beta1", cfg.beta1);
  maybe(j, "beta2", cfg.beta2);
  maybe(j, "adam_eps", cfg.adam_eps);
  if (j.contains("loss_variant")) {
    try {
      cfg.loss_variant = loss_variant_from_name(j.at("loss_variant").get<std::string>());
    } catch (const ArgumentError & e) {
      throw ConfigError(e.what());
    }
  }
  maybe(j, "squared_regression", cfg.squared_regression);
  maybe(j, "seed", cfg.seed);
  maybe(j, "val_fraction", cfg.val_fraction);
  maybe(j, "select_best_val", cfg.select_best_val);
  maybe(j, "grad_clip", cfg.grad_clip);
  return cfg;
}

Json metrics_config_to_json(const MetricsConfig & mc)
{
  Json j;
  j["fde_over_t"] = mc.fde_over_t;
  j["any_miss"] = mc.any_miss;
  return j;
}

MetricsConfig metrics_config_from_json(const Json & j)
{
  MetricsConfig mc;
  maybe(j, "fde_over_t", mc.fde_over_t);
  maybe(j, "any_miss", mc.any_miss);
  return mc;
}

Json metrics_report_to_json(const MetricsReport & report)
{
  Json j;
  j["sample_count"] = report.sample_count;
  Json ade_j;
  for (const auto & [k, v] : report.min_ade) {
    ade_j[std::to_string(k)] = v;
  }
  j["min_ade"] = std::move(ade_j);
  Json fde_j;
  for (const auto & [k, v] : report.min_fde) {
    fde_j[std::to_string(k)] = v;
  }
  j["min_fde"] = std::move(fde_j);
  Json miss_j;
  for (const auto & [k, v] : report.miss_rate) {
    miss_j[std::to_string(k)] = v;
  }
  j["miss_rate_2m"] = std::move(miss_j);
  j["off_road_rate"] = report.off_road_rate;
  return j;
}

MetricsReport metrics_report_from_json(const Json & j)
{
  MetricsReport report;
  try {
    maybe(j, "sample_count", report.sample_count);
    maybe(j, "off_road_rate", report.off_road_rate);
    const auto read_map = [&j](const char * key, std::map<int, double> & out) {
      if (!j.contains(key)) {
        return;
      }
      for (const auto & [k, v] : j.at(key).items()) {
        out[std::stoi(k)] = v.get<double>();
      }
    };
    read_map("min_ade", report.min_ade);
    read_map("min_fde", report.min_fde);
    read_map("miss_rate_2m", report.miss_rate);
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("bad metrics report: ") + e.what());
  } catch (const std::invalid_argument &) {
    throw ConfigError("bad metrics report: non-integer k key");
  }
  return report;
}

std::uint64_t json_hash(const Json & j)
{
  const std::string dump = j.dump();
  return fnv1a64(dump.data(), dump.size());
}

}  // namespace trajlab
