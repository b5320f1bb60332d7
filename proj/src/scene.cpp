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

#include "trajlab/scene.hpp"

#include <cstddef>
#include <string>

#include "trajlab/error.hpp"

namespace trajlab
{

std::size_t Scene::target_index() const
{
  std::size_t idx = agents.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].is_target) {
      idx = i;
      ++count;
    }
  }
  if (count != 1) {
    throw ArgumentError("scene must have exactly one target agent, found " + std::to_string(count));
  }
  return idx;
}

void validate_scene(const Scene & scene)
{
  auto check_polygons = [](const std::vector<Polygon> & polys, const char * what) {
    for (const Polygon & p : polys) {
      if (p.size() < 3) {
        throw ArgumentError(std::string(what) + " polygon has fewer than 3 vertices");
      }
      if (polygon_area(p) <= 0.0) {
        throw ArgumentError(std::string(what) + " polygon has zero area");
      }
    }
  };
  check_polygons(scene.drivable, "drivable");
  check_polygons(scene.ped_crossings, "ped_crossing");
  check_polygons(scene.walkways, "walkway");
  for (const Lane & lane : scene.lanes) {
    if (lane.points.size() < 2) {
      throw ArgumentError("lane polyline has fewer than 2 vertices");
    }
    if (lane.width <= 0.0) {
      throw ArgumentError("lane width must be positive");
    }
  }
  for (const AgentState & a : scene.agents) {
    if (a.half_extent.x <= 0.0 || a.half_extent.y <= 0.0) {
      throw ArgumentError("agent half_extent components must be positive");
    }
    if (!(a.heading > -kPi - 1e-12 && a.heading <= kPi + 1e-12)) {
      throw ArgumentError("agent heading outside (-pi, pi]");
    }
  }
  scene.target_index();
}

Scene to_agent_frame(const Scene & scene, std::size_t target)
{
  if (target >= scene.agents.size()) {
    throw ArgumentError("target agent index out of range");
  }
  const AgentState & ref = scene.agents[target];
  const double theta = ref.heading;
  const SE2 rot = SE2::from(-theta, {0.0, 0.0});
  const Vec2 shift = rot.apply(ref.position);
  const SE2 tf{rot.c, rot.s, {-shift.x, -shift.y}};

  Scene out = scene;
  auto map_polys = [&tf](std::vector<Polygon> & polys) {
    for (Polygon & p : polys) {
      for (Vec2 & v : p) {
        v = tf.apply(v);
      }
    }
  };
  map_polys(out.drivable);
  map_polys(out.ped_crossings);
  map_polys(out.walkways);
  for (Lane & lane : out.lanes) {
    for (Vec2 & v : lane.points) {
      v = tf.apply(v);
    }
  }
  for (AgentState & a : out.agents) {
    a.position = tf.apply(a.position);
    a.heading = wrap_angle(a.heading - theta);
  }
  // The reference agent lands exactly at the origin.
  out.agents[target].position = {0.0, 0.0};
  out.agents[target].heading = 0.0;
  return out;
}

}  // namespace trajlab
