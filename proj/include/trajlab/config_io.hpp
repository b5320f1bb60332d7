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

#ifndef TRAJLAB__CONFIG_IO_HPP_
#define TRAJLAB__CONFIG_IO_HPP_

/// \file
/// JSON round-trips for every configuration struct.  Parsers start from
/// the struct's defaults and override only the keys present, so partial
/// config files stay valid; writers emit every field in a fixed key
/// order, so serialized configs are deterministic.

#include <json.hpp>

#include "trajlab/metrics.hpp"
#include "trajlab/net.hpp"
#include "trajlab/raster.hpp"
#include "trajlab/scenegen.hpp"
#include "trajlab/train.hpp"

namespace trajlab
{

using Json = nlohmann::ordered_json;

Json arch_to_json(const ArchConfig & cfg);
ArchConfig arch_from_json(const Json & j);

Json raster_to_json(const RasterConfig & cfg);
RasterConfig raster_from_json(const Json & j);

Json layer_specs_to_json(const std::vector<LayerSpec> & specs);
std::vector<LayerSpec> layer_specs_from_json(const Json & j);

Json gen_to_json(const GenParams & params);
GenParams gen_from_json(const Json & j);

Json train_to_json(const TrainConfig & cfg);
TrainConfig train_from_json(const Json & j);

Json metrics_config_to_json(const MetricsConfig & mc);
MetricsConfig metrics_config_from_json(const Json & j);

Json metrics_report_to_json(const MetricsReport & report);
MetricsReport metrics_report_from_json(const Json & j);

/// Hash of a canonical (fixed key order, compact) JSON dump.
std::uint64_t json_hash(const Json & j);

}  // namespace trajlab

#endif  // TRAJLAB__CONFIG_IO_HPP_
