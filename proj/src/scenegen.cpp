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

#include "trajlab/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "trajlab/error.hpp"
#include "trajlab/rng.hpp"

namespace trajlab
{
namespace
{

Polygon rect_poly(double x0, double x1, double y0, double y1)
{
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

/// Centerline point of a constant-curvature path started at the origin with
/// heading 0, at arc length s.
Vec2 arc_point(double curvature, double s)
{
  if (std::abs(curvature) < 1e-12) {
    return {s, 0.0};
  }
  const double r = 1.0 / curvature;
  return {r * std::sin(curvature * s), r * (1.0 - std::cos(curvature * s))};
}

Vec2 arc_normal(double curvature, double s)
{
  const double psi = curvature * s;
  return {-std::sin(psi), std::cos(psi)};  // left normal
}

/// Road band polygon around a constant-curvature centerline.
Polygon arc_band(double curvature, double s0, double s1, double off_lo, double off_hi, int steps)
{
  Polygon poly;
  poly.reserve(2 * static_cast<std::size_t>(steps) + 2);
  for (int i = 0; i <= steps; ++i) {
    const double s = s0 + (s1 - s0) * static_cast<double>(i) / steps;
    poly.push_back(arc_point(curvature, s) + arc_normal(curvature, s) * off_hi);
  }
  for (int i = steps; i >= 0; --i) {
    const double s = s0 + (s1 - s0) * static_cast<double>(i) / steps;
    poly.push_back(arc_point(curvature, s) + arc_normal(curvature, s) * off_lo);
  }
  return poly;
}

Polyline arc_line(double curvature, double s0, double s1, double offset, int steps)
{
  Polyline line;
  line.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double s = s0 + (s1 - s0) * static_cast<double>(i) / steps;
    line.push_back(arc_point(curvature, s) + arc_normal(curvature, s) * offset);
  }
  return line;
}

struct Rollout
{
  GroundTruth gt;
  double arc_length{0.0};
};

/// Constant-curvature rollout with a clamped constant-acceleration speed
/// profile. Positions are exact arc integrals per step, so every
/// point-to-point chord is at most speed_max / frequency.
Rollout rollout_gt(
  double v0, double accel, double curvature, int steps, double frequency_hz, double speed_max)
{
  Rollout out;
  out.gt.points.reserve(static_cast<std::size_t>(steps));
  const double dt = 1.0 / frequency_hz;
  double v = v0;
  double psi = 0.0;
  Vec2 p{0.0, 0.0};
  for (int t = 0; t < steps; ++t) {
    v = std::clamp(v + accel * dt, 0.5, speed_max);
    const double ds = v * dt;
    if (std::abs(curvature) < 1e-12) {
      p = p + Vec2{std::cos(psi), std::sin(psi)} * ds;
    } else {
      const double r = 1.0 / curvature;
      const double psi_next = psi + curvature * ds;
      p = p + Vec2{r * (std::sin(psi_next) - std::sin(psi)), r * (std::cos(psi) - std::cos(psi_next))};
      psi = psi_next;
    }
    out.arc_length += ds;
    out.gt.points.push_back(p);
  }
  return out;
}

/// Expected arc length over the horizon for the same speed profile. Needed
/// before curvature can be derived from a desired heading change.
double horizon_arc_length(double v0, double accel, int steps, double frequency_hz, double speed_max)
{
  const double dt = 1.0 / frequency_hz;
  double v = v0;
  double s = 0.0;
  for (int t = 0; t < steps; ++t) {
    v = std::clamp(v + accel * dt, 0.5, speed_max);
    s += v * dt;
  }
  return s;
}

void place_other_agents(
  Scene & scene, Rng & rng, int extra_count, const GenParams & params)
{
  // Candidate spots along existing lanes.
  for (int i = 0; i < extra_count; ++i) {
    AgentState a;
    bool placed = false;
    for (int attempt = 0; attempt < 8 && !placed; ++attempt) {
      const Lane & lane = scene.lanes[rng.uniform_index(scene.lanes.size())];
      const std::size_t seg = rng.uniform_index(lane.points.size() - 1);
      const double u = rng.uniform();
      const Vec2 p0 = lane.points[seg];
      const Vec2 p1 = lane.points[seg + 1];
      const Vec2 pos = p0 + (p1 - p0) * u;
      if (pos.norm() < 6.0) {
        continue;  // keep a clear bubble around the target
      }
      const Vec2 d = p1 - p0;
      a.position = pos;
      a.heading = wrap_angle(std::atan2(d.y, d.x) + (rng.bernoulli(0.5) ? 0.0 : kPi));
      placed = true;
    }
    if (!placed) {
      a.position = {rng.uniform(-30.0, 60.0), rng.uniform(-12.0, 12.0)};
      a.heading = wrap_angle(rng.uniform(-kPi, kPi));
    }
    a.half_extent = {rng.uniform(2.0, 2.6), rng.uniform(0.85, 1.1)};
    a.speed = rng.uniform(0.0, params.speed_max * 0.8);
    a.accel = rng.uniform(-params.accel_max, params.accel_max);
    a.heading_rate = rng.uniform(-0.2, 0.2);
    a.is_target = false;
    scene.agents.push_back(a);
  }
}

void add_straight_road(
  Scene & scene, const GenParams & params, double x0, double x1)
{
  const double lw = params.lane_width;
  const double rhw = std::max(params.road_half_width, lw);
  const double yc = lw / 2.0;  // road centered between the two lanes
  scene.drivable.push_back(rect_poly(x0, x1, yc - rhw, yc + rhw));
  scene.lanes.push_back({lw, {{x0, 0.0}, {x1, 0.0}}});
  scene.lanes.push_back({lw, {{x1, lw}, {x0, lw}}});
  scene.walkways.push_back(rect_poly(x0, x1, yc + rhw + 0.3, yc + rhw + 2.0));
  scene.walkways.push_back(rect_poly(x0, x1, yc - rhw - 2.0, yc - rhw - 0.3));
}

void add_cross_road(
  Scene & scene, const GenParams & params, double xc, double y0, double y1)
{
  const double lw = params.lane_width;
  const double rhw = std::max(params.road_half_width, lw);
  scene.drivable.push_back(rect_poly(xc - rhw, xc + rhw, y0, y1));
  scene.lanes.push_back({lw, {{xc - lw / 2.0, y0}, {xc - lw / 2.0, y1}}});
  scene.lanes.push_back({lw, {{xc + lw / 2.0, y1}, {xc + lw / 2.0, y0}}});
}

}  // namespace

std::string family_name(SceneFamily f)
{
  switch (f) {
    case SceneFamily::kStraight:
      return "straight";
    case SceneFamily::kCurve:
      return "curve";
    case SceneFamily::kTee:
      return "tee";
    case SceneFamily::kCross:
      return "cross";
  }
  return "unknown";
}

SceneFamily family_from_name(const std::string & name)
{
  for (SceneFamily f : kAllFamilies) {
    if (family_name(f) == name) {
      return f;
    }
  }
  throw ArgumentError("unknown scene family: " + name);
}

void GenParams::validate() const
{
  if (agent_count_min < 1 || agent_count_max < agent_count_min) {
    throw ConfigError("agent count range must satisfy 1 <= min <= max");
  }
  if (horizon_steps < 1) {
    throw ConfigError("horizon_steps must be >= 1");
  }
  if (frequency_hz <= 0.0) {
    throw ConfigError("frequency_hz must be positive");
  }
  double total = 0.0;
  for (double w : family_weights) {
    if (w < 0.0) {
      throw ConfigError("family weights must be non-negative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw ConfigError("at least one family weight must be positive");
  }
  if (speed_min <= 0.0 || speed_max < speed_min) {
    throw ConfigError("speed range must satisfy 0 < min <= max");
  }
  if (accel_max < 0.0) {
    throw ConfigError("accel_max must be non-negative");
  }
  if (lane_width <= 0.0 || road_half_width <= 0.0 || road_length <= 0.0) {
    throw ConfigError("lane_width, road_half_width and road_length must be positive");
  }
}

namespace
{

Rng scene_rng(std::uint64_t seed) { return Rng(splitmix64(seed ^ 0x7261737465726cULL)); }

}  // namespace

SceneFamily sampled_family(std::uint64_t seed, const GenParams & params)
{
  params.validate();
  Rng rng = scene_rng(seed);
  return kAllFamilies[rng.weighted_index(params.family_weights)];
}

Sample generate_scene(std::uint64_t seed, const GenParams & params)
{
  params.validate();
  Rng rng = scene_rng(seed);

  const SceneFamily family = kAllFamilies[rng.weighted_index(params.family_weights)];
  const double v0 = rng.uniform(params.speed_min, params.speed_max);
  const double accel = rng.uniform(-params.accel_max, params.accel_max);
  const double s_horizon =
    horizon_arc_length(v0, accel, params.horizon_steps, params.frequency_hz, params.speed_max);

  // Scene is assembled in the agent frame (target at origin, heading +x),
  // pushed out to a random world pose, then brought back through
  // to_agent_frame. The round trip keeps generation and ingestion on the
  // same code path.
  Scene scene;
  double curvature = 0.0;
  const double lw = params.lane_width;
  const double rhw = std::max(params.road_half_width, lw);
  const double behind = 0.25 * params.road_length;
  const double ahead = 0.75 * params.road_length;

  switch (family) {
    case SceneFamily::kStraight: {
      curvature = 0.0;
      add_straight_road(scene, params, -behind, ahead);
      if (rng.bernoulli(0.5)) {
        const double xc = rng.uniform(15.0, 45.0);
        scene.ped_crossings.push_back(
          rect_poly(xc - 1.5, xc + 1.5, lw / 2.0 - rhw, lw / 2.0 + rhw));
      }
      break;
    }
    case SceneFamily::kCurve: {
      const double turn_deg = rng.uniform(25.0, 80.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      curvature = turn_deg * kPi / 180.0 / s_horizon;
      const double s_end = std::min(s_horizon * 1.6, kPi / std::abs(curvature) * 0.9);
      const int steps = 24;
      scene.drivable.push_back(
        arc_band(curvature, -15.0, s_end, lw / 2.0 - rhw, lw / 2.0 + rhw, steps));
      scene.lanes.push_back({lw, arc_line(curvature, -15.0, s_end, 0.0, steps)});
      scene.lanes.push_back({lw, arc_line(curvature, -15.0, s_end, lw, steps)});
      scene.walkways.push_back(
        arc_band(curvature, -15.0, s_end, lw / 2.0 + rhw + 0.3, lw / 2.0 + rhw + 2.0, steps));
      scene.walkways.push_back(
        arc_band(curvature, -15.0, s_end, lw / 2.0 - rhw - 2.0, lw / 2.0 - rhw - 0.3, steps));
      break;
    }
    case SceneFamily::kTee:
    case SceneFamily::kCross: {
      // Branch selection. On a tee the stem sits on one random side; a
      // turn is only allowed toward the stem.
      const bool stem_up = rng.bernoulli(0.5);
      int branch = 0;  // 0 straight, +1 left turn, -1 right turn
      if (family == SceneFamily::kCross) {
        const int pick = rng.uniform_int(0, 2);
        branch = pick == 0 ? 0 : (pick == 1 ? 1 : -1);
      } else {
        branch = rng.bernoulli(0.4) ? 0 : (stem_up ? 1 : -1);
      }
      double xc = 0.0;
      if (branch == 0) {
        curvature = 0.0;
        xc = rng.uniform(18.0, 40.0);
      } else {
        const double turn = branch * kPi / 2.0;
        curvature = turn / s_horizon;
        xc = std::abs(1.0 / curvature);  // turn exit aligns with the cross road
      }
      add_straight_road(scene, params, -behind, ahead);
      const double yc = lw / 2.0;
      if (family == SceneFamily::kCross) {
        add_cross_road(scene, params, xc, -0.6 * params.road_length, 0.6 * params.road_length);
      } else if (stem_up) {
        add_cross_road(scene, params, xc, yc + rhw, 0.6 * params.road_length);
      } else {
        add_cross_road(scene, params, xc, -0.6 * params.road_length, yc - rhw);
      }
      scene.ped_crossings.push_back(
        rect_poly(xc - rhw - 4.0, xc - rhw - 1.0, yc - rhw, yc + rhw));
      if (branch != 0) {
        // Lane arc for the turning branch.
        scene.lanes.push_back(
          {lw, arc_line(curvature, 0.0, kPi / 2.0 / std::abs(curvature), 0.0, 12)});
      }
      break;
    }
  }

  AgentState target;
  target.position = {0.0, 0.0};
  target.heading = 0.0;
  target.half_extent = {rng.uniform(2.1, 2.5), rng.uniform(0.9, 1.05)};
  target.speed = v0;
  target.accel = accel;
  target.heading_rate = curvature * v0;
  target.is_target = true;
  scene.agents.push_back(target);

  const int count = rng.uniform_int(params.agent_count_min, params.agent_count_max);
  place_other_agents(scene, rng, count - 1, params);

  const Rollout rolled =
    rollout_gt(v0, accel, curvature, params.horizon_steps, params.frequency_hz, params.speed_max);

  // Round trip through a random world pose.
  const double world_angle = wrap_angle(rng.uniform(-kPi, kPi));
  const Vec2 world_pos{rng.uniform(-200.0, 200.0), rng.uniform(-200.0, 200.0)};
  const SE2 to_world = SE2::from(world_angle, world_pos);
  Scene world = scene;
  auto map_polys = [&to_world](std::vector<Polygon> & polys) {
    for (Polygon & p : polys) {
      for (Vec2 & v : p) {
        v = to_world.apply(v);
      }
    }
  };
  map_polys(world.drivable);
  map_polys(world.ped_crossings);
  map_polys(world.walkways);
  for (Lane & lane : world.lanes) {
    for (Vec2 & v : lane.points) {
      v = to_world.apply(v);
    }
  }
  for (AgentState & a : world.agents) {
    a.position = to_world.apply(a.position);
    a.heading = wrap_angle(a.heading + world_angle);
  }

  Sample sample;
  sample.scene = to_agent_frame(world, world.target_index());
  sample.kinematics = {v0, accel, curvature * v0};
  sample.gt = rolled.gt;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%016llx", static_cast<unsigned long long>(seed));
  sample.sample_id = buf;
  sample.rng_seed = seed;
  validate_scene(sample.scene);
  return sample;
}

double gt_final_angle_deg(const GroundTruth & gt)
{
  if (gt.points.empty()) {
    return 0.0;
  }
  const Vec2 & last = gt.points.back();
  if (last.norm() <= 1e-6) {
    return 0.0;
  }
  return std::atan2(last.y, last.x) * 180.0 / kPi;
}

}  // namespace trajlab
