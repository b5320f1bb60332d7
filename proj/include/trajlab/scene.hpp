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
// Vector scene types: road geometry plus agent states in a common frame.

#ifndef TRAJLAB__SCENE_HPP_
#define TRAJLAB__SCENE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trajlab/geometry.hpp"

namespace trajlab
{

struct AgentState
{
  Vec2 position{};
  double heading{0.0};      // radians, in (-pi, pi]
  Vec2 half_extent{2.3, 1.0};  // half length along heading, half width (m)
  double speed{0.0};        // m/s
  double accel{0.0};        // m/s^2
  double heading_rate{0.0}; // rad/s
  bool is_target{false};
};

struct Lane
{
  double width{3.5};  // m
  Polyline points;
};

struct Scene
{
  std::vector<Polygon> drivable;
  std::vector<Lane> lanes;
  std::vector<Polygon> ped_crossings;
  std::vector<Polygon> walkways;
  std::vector<AgentState> agents;

  /// Index of the unique target agent. Throws ArgumentError if there is
  /// not exactly one.
  std::size_t target_index() const;
};

/// Future positions of the target agent in the agent frame, sampled at a
/// fixed frequency. points[t] is the position after (t+1) steps.
struct GroundTruth
{
  std::vector<Vec2> points;
};

/// One self-contained training/evaluation record. The scene is stored in
/// the agent frame: the target sits at the origin with heading 0.
struct Sample
{
  Scene scene;
  std::array<double, 3> kinematics{};  // speed (m/s), accel (m/s^2), heading rate (rad/s)
  GroundTruth gt;
  std::string sample_id;
  std::uint64_t rng_seed{0};
};

/// Validates scene invariants (polygon vertex counts and areas, lane
/// lengths, unique target). Throws ArgumentError on violation.
void validate_scene(const Scene & scene);

/// Rigidly transforms all geometry so the agent at `target` lands at the
/// origin with heading 0. Distances are preserved.
Scene to_agent_frame(const Scene & scene, std::size_t target);

}  // namespace trajlab

#endif  // TRAJLAB__SCENE_HPP_
