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
// Bird's-eye-view rasterization of scene layers into fixed-size RGB grids,
// plus the binary drivable mask used by the off-road metric.
//
// Image convention: the agent-frame +x axis (heading) points up in the
// image, +y points left. target_offset places the agent within the image
// as a fraction of the side: (0.5, 0.5) is the center.

#ifndef TRAJLAB__RASTER_HPP_
#define TRAJLAB__RASTER_HPP_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "trajlab/scene.hpp"

namespace trajlab
{

enum class LayerKind { kDrivable, kLane, kPedCrossing, kWalkway, kAgents };

inline constexpr std::array<LayerKind, 5> kAllLayerKinds = {
  LayerKind::kDrivable, LayerKind::kLane, LayerKind::kPedCrossing, LayerKind::kWalkway,
  LayerKind::kAgents};

std::string layer_kind_name(LayerKind k);
LayerKind layer_kind_from_name(const std::string & name);  // throws ArgumentError

/// An ordered, duplicate-free list of layer kinds painted into one grid.
/// Later kinds overwrite earlier ones pixel-wise, so dynamic kinds should
/// be listed last.
struct LayerSpec
{
  std::vector<LayerKind> kinds;

  std::string name() const;  // kinds joined with '+', e.g. "drivable+lane"
  void validate() const;     // throws ArgumentError
  friend bool operator==(const LayerSpec &, const LayerSpec &) = default;
};

/// The paper-order default stack: drivable+lane, lane+agents, drivable,
/// agents (codebook indices 1..4).
std::vector<LayerSpec> default_layer_specs();

/// Layer specs for codebook indices (1-based) into default_layer_specs().
std::vector<LayerSpec> layer_specs_from_codes(const std::vector<int> & codes);

struct RasterConfig
{
  int size_px{64};
  double extent_m{50.0};
  Vec2 target_offset{0.5, 0.75};
  std::map<LayerKind, std::array<double, 3>> color_table{
    {LayerKind::kDrivable, {0.30, 0.30, 0.30}},
    {LayerKind::kLane, {1.00, 0.85, 0.30}},
    {LayerKind::kPedCrossing, {0.45, 0.60, 0.95}},
    {LayerKind::kWalkway, {0.35, 0.75, 0.45}},
    {LayerKind::kAgents, {0.90, 0.15, 0.15}},
  };

  double meters_per_pixel() const { return extent_m / size_px; }
  void validate() const;  // throws ConfigError

  /// Continuous pixel coordinates (col, row) of an agent-frame point.
  /// Pixel (c, r) covers [c, c+1) x [r, r+1); its center is (c+0.5, r+0.5).
  Vec2 world_to_pixel(const Vec2 & p) const;
  /// Agent-frame point at the center of pixel (col, row).
  Vec2 pixel_center_world(int col, int row) const;
};

/// One rasterized layer: size x size RGB values in [0, 1], row-major with
/// channel fastest.
struct Grid
{
  int size{0};
  std::vector<double> rgb;

  static Grid zeros(int size_px);
  double & at(int col, int row, int ch);
  double at(int col, int row, int ch) const;
};

struct RasterStack
{
  std::vector<LayerSpec> specs;
  std::vector<Grid> layers;
};

/// Binary occupancy grid. true means the pixel center is inside some
/// drivable polygon.
struct Mask
{
  int size{0};
  std::vector<unsigned char> bits;

  bool at(int col, int row) const
  {
    return bits[static_cast<std::size_t>(row) * size + col] != 0;
  }
};

/// Paints one layer spec. Scene must be in the agent frame.
Grid rasterize_layer(const Scene & scene, const LayerSpec & spec, const RasterConfig & cfg);

/// One grid per spec, in order.
RasterStack build_stack(
  const Scene & scene, const std::vector<LayerSpec> & specs, const RasterConfig & cfg);

/// Drivable-area mask via scanline polygon fill with pixel-center sampling.
Mask drivable_mask(const Scene & scene, const RasterConfig & cfg);

/// Binary P6 dump for visual inspection.
std::string grid_to_ppm(const Grid & grid);
void write_ppm(const std::string & path, const Grid & grid);

}  // namespace trajlab

#endif  // TRAJLAB__RASTER_HPP_
