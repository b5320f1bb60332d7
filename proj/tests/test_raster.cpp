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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_oracles.hpp"
#include "trajlab/error.hpp"
#include "trajlab/raster.hpp"
#include "trajlab/scenegen.hpp"

using namespace trajlab;

namespace
{

RasterConfig small_cfg()
{
  RasterConfig cfg;
  cfg.size_px = 32;
  cfg.extent_m = 32.0;  // 1 m per pixel
  cfg.target_offset = {0.5, 0.5};
  return cfg;
}

Scene lone_agent_scene(double half_length, double half_width)
{
  Scene scene;
  AgentState a;
  a.position = {0.0, 0.0};
  a.heading = 0.0;
  a.half_extent = {half_length, half_width};
  a.is_target = true;
  scene.agents.push_back(a);
  return scene;
}

bool pixel_is(const Grid & g, int c, int r, const std::array<double, 3> & color)
{
  return std::abs(g.at(c, r, 0) - color[0]) < 1e-12 &&
         std::abs(g.at(c, r, 1) - color[1]) < 1e-12 &&
         std::abs(g.at(c, r, 2) - color[2]) < 1e-12;
}

bool pixel_zero(const Grid & g, int c, int r)
{
  return g.at(c, r, 0) == 0.0 && g.at(c, r, 1) == 0.0 && g.at(c, r, 2) == 0.0;
}

}  // namespace

TEST_CASE("empty scene rasterizes to an all-zero grid")
{
  const RasterConfig cfg = small_cfg();
  const Scene scene;
  for (LayerKind kind : kAllLayerKinds) {
    const Grid g = rasterize_layer(scene, LayerSpec{{kind}}, cfg);
    for (int r = 0; r < cfg.size_px; ++r) {
      for (int c = 0; c < cfg.size_px; ++c) {
        REQUIRE(pixel_zero(g, c, r));
      }
    }
  }
}

TEST_CASE("centered target agent paints the expected axis-aligned box")
{
  const RasterConfig cfg = small_cfg();
  // Heading 0: the 8 m x 4 m box spans x in [-4,4], y in [-2,2].
  const Scene scene = lone_agent_scene(4.0, 2.0);
  const Grid g = rasterize_layer(scene, LayerSpec{{LayerKind::kAgents}}, cfg);
  const auto color = cfg.color_table.at(LayerKind::kAgents);
  // col = 16 - y, row = 16 - x with pixel centers at +0.5: the covered
  // centers are cols {12..19} (y in (-2,2]... computed below) and rows
  // {12..19}. A center (c+0.5, r+0.5) maps to y = 15.5-c, x = 15.5-r;
  // inside means |y| <= 2 and |x| <= 4.
  for (int r = 0; r < cfg.size_px; ++r) {
    for (int c = 0; c < cfg.size_px; ++c) {
      const Vec2 w = cfg.pixel_center_world(c, r);
      const bool inside = std::abs(w.x) <= 4.0 && std::abs(w.y) <= 2.0;
      if (inside) {
        REQUIRE(pixel_is(g, c, r, color));
      } else {
        REQUIRE(pixel_zero(g, c, r));
      }
    }
  }
  // The painted block is centered: counts match on both sides of center.
  int painted = 0;
  for (int r = 0; r < cfg.size_px; ++r) {
    for (int c = 0; c < cfg.size_px; ++c) {
      painted += pixel_is(g, c, r, color) ? 1 : 0;
    }
  }
  CHECK(painted == 8 * 4);  // 8 m x 4 m at 1 m/px with on-edge centers inside
}

TEST_CASE("agents overwrite drivable pixels in a composite layer")
{
  const RasterConfig cfg = small_cfg();
  Scene scene = lone_agent_scene(2.0, 1.0);
  scene.drivable.push_back({{-10.0, -10.0}, {10.0, -10.0}, {10.0, 10.0}, {-10.0, 10.0}});
  const Grid g =
    rasterize_layer(scene, LayerSpec{{LayerKind::kDrivable, LayerKind::kAgents}}, cfg);
  const auto agent_color = cfg.color_table.at(LayerKind::kAgents);
  const auto drivable_color = cfg.color_table.at(LayerKind::kDrivable);
  const Vec2 middle = cfg.world_to_pixel({0.0, 0.0});
  const int cc = static_cast<int>(std::floor(middle.x));
  const int cr = static_cast<int>(std::floor(middle.y));
  CHECK(pixel_is(g, cc, cr, agent_color));
  // A drivable pixel away from the agent keeps the drivable color.
  const Vec2 edge = cfg.world_to_pixel({8.0, 8.0});
  CHECK(pixel_is(
    g, static_cast<int>(std::floor(edge.x)), static_cast<int>(std::floor(edge.y)),
    drivable_color));
  // Reversing the kind order flips the overlap winner.
  const Grid flipped =
    rasterize_layer(scene, LayerSpec{{LayerKind::kAgents, LayerKind::kDrivable}}, cfg);
  CHECK(pixel_is(flipped, cc, cr, drivable_color));
}

TEST_CASE("default stack is the four-layer codebook")
{
  const std::vector<LayerSpec> specs = default_layer_specs();
  REQUIRE(specs.size() == 4);
  CHECK(specs[0].name() == "drivable+lane");
  CHECK(specs[1].name() == "lane+agents");
  CHECK(specs[2].name() == "drivable");
  CHECK(specs[3].name() == "agents");

  const std::vector<LayerSpec> subset = layer_specs_from_codes({2, 3, 4});
  REQUIRE(subset.size() == 3);
  CHECK(subset[0].name() == "lane+agents");
  CHECK(subset[1].name() == "drivable");
  CHECK(subset[2].name() == "agents");
  CHECK_THROWS_AS(layer_specs_from_codes({0}), ArgumentError);
  CHECK_THROWS_AS(layer_specs_from_codes({5}), ArgumentError);
  CHECK_THROWS_AS(LayerSpec{}.validate(), ArgumentError);
}

TEST_CASE("build_stack renders one grid per spec deterministically")
{
  const RasterConfig cfg = small_cfg();
  const Sample s = generate_scene(5, GenParams{});
  const RasterStack a = build_stack(s.scene, default_layer_specs(), cfg);
  const RasterStack b = build_stack(s.scene, default_layer_specs(), cfg);
  REQUIRE(a.layers.size() == 4);
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    CHECK(grid_to_ppm(a.layers[i]) == grid_to_ppm(b.layers[i]));
  }
  const RasterStack three = build_stack(s.scene, layer_specs_from_codes({2, 3, 4}), cfg);
  CHECK(three.layers.size() == 3);
  // Grid values stay within [0, 1].
  for (const Grid & g : a.layers) {
    for (double v : g.rgb) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("pixel round trip is the identity on pixel centers")
{
  RasterConfig cfg;
  cfg.size_px = 64;
  cfg.extent_m = 50.0;
  cfg.target_offset = {0.5, 0.75};
  for (int r = 0; r < cfg.size_px; r += 7) {
    for (int c = 0; c < cfg.size_px; c += 7) {
      const Vec2 w = cfg.pixel_center_world(c, r);
      const Vec2 back = cfg.world_to_pixel(w);
      CHECK(std::abs(back.x - (c + 0.5)) < 1e-9);
      CHECK(std::abs(back.y - (r + 0.5)) < 1e-9);
    }
  }
}

TEST_CASE("drivable mask covering the whole window and the empty scene")
{
  const RasterConfig cfg = small_cfg();
  Scene full;
  full.drivable.push_back({{-40.0, -40.0}, {40.0, -40.0}, {40.0, 40.0}, {-40.0, 40.0}});
  const Mask all_true = drivable_mask(full, cfg);
  const Mask all_false = drivable_mask(Scene{}, cfg);
  for (int r = 0; r < cfg.size_px; ++r) {
    for (int c = 0; c < cfg.size_px; ++c) {
      REQUIRE(all_true.at(c, r));
      REQUIRE(!all_false.at(c, r));
    }
  }
}

TEST_CASE("half-plane road matches the point-in-polygon oracle per pixel")
{
  const RasterConfig cfg = small_cfg();
  Scene scene;
  // Left half of the window: y >= 0 in the agent frame.
  scene.drivable.push_back({{-40.0, 0.0}, {40.0, 0.0}, {40.0, 40.0}, {-40.0, 40.0}});
  const Mask mask = drivable_mask(scene, cfg);
  for (int r = 0; r < cfg.size_px; ++r) {
    for (int c = 0; c < cfg.size_px; ++c) {
      const Vec2 w = cfg.pixel_center_world(c, r);
      REQUIRE(mask.at(c, r) == point_in_polygon(w, scene.drivable[0]));
    }
  }
}

TEST_CASE("drivable mask agrees with the oracle on random convex polygons")
{
  const RasterConfig cfg = small_cfg();
  Rng rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    Scene scene;
    scene.drivable.push_back(oracle::random_convex_polygon(rng, cfg.extent_m));
    if (rng.bernoulli(0.5)) {
      scene.drivable.push_back(oracle::random_convex_polygon(rng, cfg.extent_m));
    }
    const Mask mask = drivable_mask(scene, cfg);
    for (int r = 0; r < cfg.size_px; ++r) {
      for (int c = 0; c < cfg.size_px; ++c) {
        const Vec2 w = cfg.pixel_center_world(c, r);
        bool inside = false;
        for (const auto & poly : scene.drivable) {
          inside = inside || point_in_polygon(w, poly);
        }
        REQUIRE(mask.at(c, r) == inside);
      }
    }
  }
}

TEST_CASE("lane strokes paint within the configured width")
{
  const RasterConfig cfg = small_cfg();
  Scene scene;
  Lane lane;
  lane.width = 2.0;
  lane.points = {{-10.0, 0.0}, {10.0, 0.0}};
  scene.lanes.push_back(lane);
  const Grid g = rasterize_layer(scene, LayerSpec{{LayerKind::kLane}}, cfg);
  const auto color = cfg.color_table.at(LayerKind::kLane);
  for (int r = 0; r < cfg.size_px; ++r) {
    for (int c = 0; c < cfg.size_px; ++c) {
      const Vec2 w = cfg.pixel_center_world(c, r);
      const double d = point_polyline_distance(w, lane.points);
      if (pixel_is(g, c, r, color)) {
        CHECK(d <= 1.0 + 1e-9);
      } else {
        CHECK(d > 1.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("ppm dump has the P6 header and full payload")
{
  const RasterConfig cfg = small_cfg();
  const Scene scene = lone_agent_scene(2.0, 1.0);
  const Grid g = rasterize_layer(scene, LayerSpec{{LayerKind::kAgents}}, cfg);
  const std::string ppm = grid_to_ppm(g);
  CHECK(ppm.rfind("P6\n32 32\n255\n", 0) == 0);
  CHECK(ppm.size() == std::string("P6\n32 32\n255\n").size() + 32 * 32 * 3);
}

TEST_CASE("raster config validation rejects bad values")
{
  RasterConfig cfg = small_cfg();
  cfg.size_px = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_cfg();
  cfg.extent_m = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_cfg();
  cfg.target_offset = {1.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
