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

#ifndef TRAJLAB__METRICS_HPP_
#define TRAJLAB__METRICS_HPP_

/// \file
/// Motion forecasting metrics: minADE_k, minFDE_k, miss rate at 2 m, and
/// off-road rate, plus dataset-level aggregation and table serialization.

#include <map>
#include <string>
#include <vector>

#include "trajlab/geometry.hpp"
#include "trajlab/net.hpp"
#include "trajlab/raster.hpp"

namespace trajlab
{

inline constexpr double kMissThresholdMeters = 2.0;

struct MetricsConfig
{
  /// Divide the final displacement by T (the literal printed formula)
  /// instead of reporting the plain final-point distance.
  bool fde_over_t = false;
  /// Count a sample as missed when ANY top-k trajectory misses, instead
  /// of the default ALL-miss rule.
  bool any_miss = false;
};

struct MetricsReport
{
  std::map<int, double> min_ade;    ///< k -> meters
  std::map<int, double> min_fde;    ///< k -> meters
  std::map<int, double> miss_rate;  ///< k -> rate in [0, 1]
  double off_road_rate = 0.0;
  std::size_t sample_count = 0;
};

/// Mean over timesteps of the pointwise L2 distance, meters.
double ade(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt);

/// L2 distance between final points; with over_t, divided by T.
double fde(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt, bool over_t = false);

/// Indices of the k most confident modes, highest first; ties keep the
/// lower index first.  Throws ArgumentError unless 1 <= k <= M.
std::vector<int> top_k_indices(const std::vector<double> & confidences, int k);

/// The k most confident trajectories, in confidence order.
std::vector<std::vector<Vec2>> top_k(const Prediction & prediction, int k);

double min_ade_k(const Prediction & prediction, const std::vector<Vec2> & gt, int k);
double min_fde_k(
  const Prediction & prediction, const std::vector<Vec2> & gt, int k, bool over_t = false);

/// Maximum pointwise L2 distance strictly greater than 2 m.
bool is_miss(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt);

/// Fraction of samples whose top-k trajectories all miss (or any misses,
/// with the any_miss flag).  Throws ArgumentError on an empty dataset.
double miss_rate_2m(
  const std::vector<Prediction> & predictions, const std::vector<std::vector<Vec2>> & gts, int k,
  bool any_miss = false);

/// True when any point of the trajectory lands on a non-drivable pixel
/// or outside the raster window.
bool trajectory_off_road(
  const std::vector<Vec2> & traj, const Mask & drivable, const RasterConfig & cfg);

/// Fraction of this prediction's modes with at least one off-road point.
double off_road_fraction(
  const Prediction & prediction, const Mask & drivable, const RasterConfig & cfg);

/// Mean over samples of off_road_fraction.
double off_road_rate(
  const std::vector<Prediction> & predictions, const std::vector<Mask> & masks,
  const RasterConfig & cfg);

/// All metrics over the requested k values (k is clamped to the mode
/// count, so a 3-mode model reports the same value for k=5 and k=10);
/// min_fde is computed for fde_k_list, which the standard table schema
/// fixes at k=1.
MetricsReport aggregate(
  const std::vector<Prediction> & predictions, const std::vector<std::vector<Vec2>> & gts,
  const std::vector<Mask> & masks, const RasterConfig & cfg, const std::vector<int> & k_list,
  const std::vector<int> & fde_k_list = {1}, const MetricsConfig & mc = {});

/// Column header and one value row in the standard table order:
/// minADE5 | minADE10 | MissRateTop5 | MissRateTop10 | minFDE1 | offRoadRate.
std::string metrics_table_header(char sep = ',');
std::string metrics_table_row(const MetricsReport & report, char sep = ',');

/// Multi-line human-readable report.
std::string metrics_to_text(const MetricsReport & report);

}  // namespace trajlab

#endif  // TRAJLAB__METRICS_HPP_
