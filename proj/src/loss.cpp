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

#include "trajlab/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trajlab/error.hpp"

namespace trajlab
{

std::optional<double> angle_between_deg(
  const std::vector<Vec2> & traj, const std::vector<Vec2> & gt, double eps)
{
  if (traj.empty() || gt.empty()) {
    return std::nullopt;
  }
  const Vec2 a = traj.back();
  const Vec2 b = gt.back();
  const double na = a.norm();
  const double nb = b.norm();
  if (na <= eps || nb <= eps) {
    return std::nullopt;
  }
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

double regression_loss(const std::vector<Vec2> & traj, const std::vector<Vec2> & gt, bool squared)
{
  if (traj.size() != gt.size() || traj.empty()) {
    throw ArgumentError("regression_loss needs equal, nonzero trajectory lengths");
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const double d = (traj[t] - gt[t]).norm();
    acc += squared ? d * d : d;
  }
  return acc / static_cast<double>(traj.size());
}

int select_winner(
  const std::vector<std::vector<Vec2>> & trajectories, const std::vector<Vec2> & gt, double eps)
{
  if (trajectories.empty()) {
    throw ArgumentError("select_winner needs at least one trajectory");
  }
  int best = -1;
  double best_angle = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto angle = angle_between_deg(trajectories[k], gt, eps);
    if (angle.has_value() && *angle < best_angle) {
      best_angle = *angle;
      best = static_cast<int>(k);
    }
  }
  if (best >= 0) {
    return best;
  }
  // Stationary gt (or no usable angles): closest trajectory wins.
  double best_dist = std::numeric_limits<double>::infinity();
  best = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const double d = regression_loss(trajectories[k], gt);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double classification_loss(const std::vector<double> & confidences, int winner)
{
  if (winner < 0 || winner >= static_cast<int>(confidences.size())) {
    throw ArgumentError("classification_loss winner index out of range");
  }
  return -std::log(std::max(confidences[static_cast<std::size_t>(winner)], kConfidenceFloor));
}

LossBreakdown mtp_loss(
  const std::vector<std::vector<Vec2>> & trajectories, const std::vector<double> & confidences,
  const std::vector<Vec2> & gt, bool squared_regression)
{
  if (trajectories.size() != confidences.size()) {
    throw ArgumentError("mtp_loss: trajectory and confidence counts differ");
  }
  LossBreakdown out;
  out.winner_index = select_winner(trajectories, gt);
  const auto angle = angle_between_deg(trajectories[static_cast<std::size_t>(out.winner_index)], gt);
  out.angle_deg = angle.value_or(0.0);
  out.regression =
    regression_loss(trajectories[static_cast<std::size_t>(out.winner_index)], gt, squared_regression);
  out.classification = classification_loss(confidences, out.winner_index);
  out.penalty = 1.0;
  out.total = out.regression + out.classification;
  return out;
}

double angle_penalty(const std::vector<Vec2> & gt, double eps)
{
  if (gt.empty() || gt.back().norm() <= eps) {
    return 1.0;
  }
  const double alpha_deg = std::atan2(gt.back().y, gt.back().x) * 180.0 / kPi;
  return std::exp(std::fabs(alpha_deg) / kAnglePenaltyScale);
}

LossBreakdown angle_scaled_loss(
  const std::vector<std::vector<Vec2>> & trajectories, const std::vector<double> & confidences,
  const std::vector<Vec2> & gt, bool squared_regression)
{
  LossBreakdown out = mtp_loss(trajectories, confidences, gt, squared_regression);
  out.penalty = angle_penalty(gt);
  out.total *= out.penalty;
  return out;
}

}  // namespace trajlab
