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

#include "trajlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "trajlab/error.hpp"

namespace trajlab
{
namespace
{

void require_equal_t(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt)
{
  if (traj.size() != gt.size() || traj.empty()) {
    throw ArgumentError("metric needs equal, nonzero trajectory lengths");
  }
}

std::string format_value(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

double ade(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt)
{
  require_equal_t(traj, gt);
  double acc = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    acc += (traj[t] - gt[t]).norm();
  }
  return acc / static_cast<double>(traj.size());
}

double fde(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt, bool over_t)
{
  require_equal_t(traj, gt);
  const double d = (traj.back() - gt.back()).norm();
  return over_t ? d / static_cast<double>(traj.size()) : d;
}

std::vector<int> top_k_indices(const std::vector<double> & confidences, int k)
{
  const int m = static_cast<int>(confidences.size());
  if (k < 1 || k > m) {
    throw ArgumentError("top_k: k must satisfy 1 <= k <= mode count");
  }
  std::vector<int> order(confidences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&confidences](int a, int b) {
    return confidences[static_cast<std::size_t>(a)] > confidences[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

std::vector<std::vector<Vec2>> top_k(const Prediction & prediction, int k)
{
  std::vector<std::vector<Vec2>> out;
  for (int idx : top_k_indices(prediction.confidences, k)) {
    out.push_back(prediction.trajectories[static_cast<std::size_t>(idx)]);
  }
  return out;
}

double min_ade_k(const Prediction & prediction, const std::vector<Vec2> & gt, int k)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & traj : top_k(prediction, k)) {
    best = std::min(best, ade(traj, gt));
  }
  return best;
}

double min_fde_k(const Prediction & prediction, const std::vector<Vec2> & gt, int k, bool over_t)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & traj : top_k(prediction, k)) {
    best = std::min(best, fde(traj, gt, over_t));
  }
  return best;
}

bool is_miss(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt)
{
  require_equal_t(traj, gt);
  double worst = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    worst = std::max(worst, (traj[t] - gt[t]).norm());
  }
  return worst > kMissThresholdMeters;
}

double miss_rate_2m(
  const std::vector<Prediction> & predictions, const std::vector<std::vector<Vec2>> & gts, int k,
  bool any_miss)
{
  if (predictions.empty()) {
    throw ArgumentError("miss_rate_2m over an empty dataset");
  }
  if (predictions.size() != gts.size()) {
    throw ArgumentError("miss_rate_2m: prediction and ground-truth counts differ");
  }
  std::size_t missed = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    bool sample_missed = !any_miss;
    for (const auto & traj : top_k(predictions[i], k)) {
      const bool m = is_miss(traj, gts[i]);
      if (any_miss) {
        sample_missed = sample_missed || m;
      } else {
        sample_missed = sample_missed && m;
      }
    }
    missed += sample_missed ? 1 : 0;
  }
  return static_cast<double>(missed) / static_cast<double>(predictions.size());
}

bool trajectory_off_road(
  const std::vector<Vec2> & traj, const Mask & drivable, const RasterConfig & cfg)
{
  for (const Vec2 & p : traj) {
    const Vec2 px = cfg.world_to_pixel(p);
    const int c = static_cast<int>(std::floor(px.x));
    const int r = static_cast<int>(std::floor(px.y));
    if (c < 0 || c >= drivable.size || r < 0 || r >= drivable.size) {
      return true;
    }
    if (!drivable.at(c, r)) {
      return true;
    }
  }
  return false;
}

double off_road_fraction(
  const Prediction & prediction, const Mask & drivable, const RasterConfig & cfg)
{
  if (prediction.trajectories.empty()) {
    throw ArgumentError("off_road_fraction of an empty prediction");
  }
  std::size_t off = 0;
  for (const auto & traj : prediction.trajectories) {
    off += trajectory_off_road(traj, drivable, cfg) ? 1 : 0;
  }
  return static_cast<double>(off) / static_cast<double>(prediction.trajectories.size());
}

double off_road_rate(
  const std::vector<Prediction> & predictions, const std::vector<Mask> & masks,
  const RasterConfig & cfg)
{
  if (predictions.empty()) {
    throw ArgumentError("off_road_rate over an empty dataset");
  }
  if (predictions.size() != masks.size()) {
    throw ArgumentError("off_road_rate: every prediction needs a drivable mask");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    acc += off_road_fraction(predictions[i], masks[i], cfg);
  }
  return acc / static_cast<double>(predictions.size());
}

MetricsReport aggregate(
  const std::vector<Prediction> & predictions, const std::vector<std::vector<Vec2>> & gts,
  const std::vector<Mask> & masks, const RasterConfig & cfg, const std::vector<int> & k_list,
  const std::vector<int> & fde_k_list, const MetricsConfig & mc)
{
  if (predictions.empty()) {
    throw ArgumentError("aggregate over an empty dataset");
  }
  if (predictions.size() != gts.size() || predictions.size() != masks.size()) {
    throw ArgumentError("aggregate: input vectors have inconsistent lengths");
  }
  MetricsReport report;
  report.sample_count = predictions.size();
  const double n = static_cast<double>(predictions.size());

  auto clamp_k = [&predictions](int k) {
    const int m = static_cast<int>(predictions.front().confidences.size());
    return std::min(k, m);
  };
  for (int k : k_list) {
    const int kk = clamp_k(k);
    double ade_acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      ade_acc += min_ade_k(predictions[i], gts[i], kk);
    }
    report.min_ade[k] = ade_acc / n;
    report.miss_rate[k] = miss_rate_2m(predictions, gts, kk, mc.any_miss);
  }
  for (int k : fde_k_list) {
    const int kk = clamp_k(k);
    double fde_acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      fde_acc += min_fde_k(predictions[i], gts[i], kk, mc.fde_over_t);
    }
    report.min_fde[k] = fde_acc / n;
  }
  report.off_road_rate = off_road_rate(predictions, masks, cfg);
  return report;
}

std::string metrics_table_header(char sep)
{
  std::string s = "minADE5";
  s += sep;
  s += "minADE10";
  s += sep;
  s += "MissRateTop5";
  s += sep;
  s += "MissRateTop10";
  s += sep;
  s += "minFDE1";
  s += sep;
  s += "offRoadRate";
  return s;
}

std::string metrics_table_row(const MetricsReport & report, char sep)
{
  auto lookup = [](const std::map<int, double> & m, int k) {
    const auto it = m.find(k);
    if (it == m.end()) {
      throw ArgumentError("metrics report lacks k=" + std::to_string(k));
    }
    return it->second;
  };
  std::string s = format_value(lookup(report.min_ade, 5));
  s += sep;
  s += format_value(lookup(report.min_ade, 10));
  s += sep;
  s += format_value(lookup(report.miss_rate, 5));
  s += sep;
  s += format_value(lookup(report.miss_rate, 10));
  s += sep;
  s += format_value(lookup(report.min_fde, 1));
  s += sep;
  s += format_value(report.off_road_rate);
  return s;
}

std::string metrics_to_text(const MetricsReport & report)
{
  std::string out;
  char line[96];
  std::snprintf(line, sizeof(line), "samples        %zu\n", report.sample_count);
  out += line;
  for (const auto & [k, v] : report.min_ade) {
    std::snprintf(line, sizeof(line), "minADE%-3d      %.4f\n", k, v);
    out += line;
  }
  for (const auto & [k, v] : report.min_fde) {
    std::snprintf(line, sizeof(line), "minFDE%-3d      %.4f\n", k, v);
    out += line;
  }
  for (const auto & [k, v] : report.miss_rate) {
    std::snprintf(line, sizeof(line), "MissRateTop%-3d %.4f\n", k, v);
    out += line;
  }
  std::snprintf(line, sizeof(line), "offRoadRate    %.4f\n", report.off_road_rate);
  out += line;
  return out;
}

}  // namespace trajlab
