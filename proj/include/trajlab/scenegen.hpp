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
//
// Randomized synthetic scene generation: straight roads, arcs and
// intersections with a kinematically consistent future trajectory for the
// target agent.

#ifndef TRAJLAB__SCENEGEN_HPP_
#define TRAJLAB__SCENEGEN_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "trajlab/scene.hpp"

namespace trajlab
{

enum class SceneFamily { kStraight, kCurve, kTee, kCross };

inline constexpr std::array<SceneFamily, 4> kAllFamilies = {
  SceneFamily::kStraight, SceneFamily::kCurve, SceneFamily::kTee, SceneFamily::kCross};

std::string family_name(SceneFamily f);
SceneFamily family_from_name(const std::string & name);  // throws ArgumentError

struct GenParams
{
  /// Sampling weights per family, order matching kAllFamilies.
  std::array<double, 4> family_weights{1.0, 1.0, 1.0, 1.0};
  int agent_count_min{1};  // includes the target
  int agent_count_max{6};
  int horizon_steps{12};
  double frequency_hz{2.0};
  double speed_min{3.0};   // initial target speed range (m/s)
  double speed_max{12.0};  // also an absolute cap during rollout
  double accel_max{1.5};   // |accel| bound (m/s^2)
  double lane_width{3.5};
  double road_half_width{4.0};
  double road_length{120.0};

  void validate() const;  // throws ConfigError
};

/// Generates one sample: a valid scene in the agent frame plus the target's
/// kinematics and ground-truth rollout. Pure function of (seed, params).
Sample generate_scene(std::uint64_t seed, const GenParams & params);

/// Family that generate_scene picks for the same (seed, params). Lets
/// callers bucket samples per family without re-running the generator.
SceneFamily sampled_family(std::uint64_t seed, const GenParams & params);

/// Signed angle (degrees) of the ground-truth final point, atan2(y_T, x_T).
/// Returns 0 for a degenerate final point.
double gt_final_angle_deg(const GroundTruth & gt);

}  // namespace trajlab

#endif  // TRAJLAB__SCENEGEN_HPP_
