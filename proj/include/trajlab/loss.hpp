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

#ifndef TRAJLAB__LOSS_HPP_
#define TRAJLAB__LOSS_HPP_

/// \file
/// Multi-hypothesis trajectory losses.
///
/// The winner among K hypotheses is the one whose final point makes the
/// least angle with the ground-truth final point.  The base loss adds a
/// regression term (mean pointwise Euclidean distance, meters) and a
/// classification term (negative log of the winner's confidence).  The
/// angle-scaled variant multiplies the base loss by exp(|alpha|/20) where
/// alpha is the ground-truth final-point bearing in degrees, upweighting
/// turning samples against straight-heavy data.

#include <optional>
#include <vector>

#include "trajlab/geometry.hpp"

namespace trajlab
{

/// Final points with norm at or below this are treated as degenerate.
inline constexpr double kDegenerateFinalEps = 1e-6;
/// Confidences are floored at this value before taking the log.
inline constexpr double kConfidenceFloor = 1e-12;
/// Divisor applied to |alpha| (degrees) inside the exponential penalty.
inline constexpr double kAnglePenaltyScale = 20.0;

struct LossBreakdown
{
  int winner_index = -1;
  double angle_deg = 0.0;      ///< winner vs gt final-point angle; 0 on degenerate fallback
  double regression = 0.0;     ///< meters
  double classification = 0.0; ///< nats
  double penalty = 1.0;        ///< >= 1, dimensionless
  double total = 0.0;
};

/// Angle in degrees, within [0, 180], between the final points of the two
/// trajectories.  Empty trajectories or final points with norm <= eps are
/// degenerate and yield nullopt.
std::optional<double> angle_between_deg(
  const std::vector<Vec2> & traj, const std::vector<Vec2> & gt,
  double eps = kDegenerateFinalEps);

/// Mean over timesteps of the pointwise Euclidean distance in meters.
/// With squared set, mean of squared distances instead.
double regression_loss(
  const std::vector<Vec2> & traj, const std::vector<Vec2> & gt, bool squared = false);

/// Index of the hypothesis whose final point makes the least angle with
/// the ground-truth final point; ties go to the lower index.  When the
/// ground-truth final point is degenerate (stationary agent) or no
/// hypothesis has a usable angle, falls back to the argmin of the
/// regression distance.
int select_winner(
  const std::vector<std::vector<Vec2>> & trajectories, const std::vector<Vec2> & gt,
  double eps = kDegenerateFinalEps);

/// -ln(max(p_winner, 1e-12)).
double classification_loss(const std::vector<double> & confidences, int winner);

/// Base multi-hypothesis loss: winner by angle, then regression plus
/// classification.  penalty field is 1.
LossBreakdown mtp_loss(
  const std::vector<std::vector<Vec2>> & trajectories, const std::vector<double> & confidences,
  const std::vector<Vec2> & gt, bool squared_regression = false);

/// exp(|alpha|/20) with alpha = atan2(y_T, x_T) of the gt final point in
/// degrees; 1 for a degenerate final point.
double angle_penalty(const std::vector<Vec2> & gt, double eps = kDegenerateFinalEps);

/// Base loss scaled by the angle penalty.  The penalty depends only on
/// the ground truth, so gradients are the base-loss gradients scaled by
/// the same constant.
LossBreakdown angle_scaled_loss(
  const std::vector<std::vector<Vec2>> & trajectories, const std::vector<double> & confidences,
  const std::vector<Vec2> & gt, bool squared_regression = false);

}  // namespace trajlab

#endif  // TRAJLAB__LOSS_HPP_
