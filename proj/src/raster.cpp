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

#include "trajlab/raster.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "trajlab/dataset.hpp"
#include "trajlab/error.hpp"

namespace trajlab
{
namespace
{

/// Scanline fill with pixel-center sampling in continuous pixel space.
/// A pixel is painted when its center lies inside the polygon; centers
/// exactly on an edge count as inside (a second pass catches ties the
/// half-open crossing rule excludes).
template <typename PaintFn>
void fill_polygon(const Polygon & world_poly, const RasterConfig & cfg, PaintFn && paint)
{
  const std::size_t n = world_poly.size();
  if (n < 3) {
    return;
  }
  std::vector<Vec2> px(n);
  double ymin = 1e300;
  double ymax = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = cfg.world_to_pixel(world_poly[i]);
    ymin = std::min(ymin, px[i].y);
    ymax = std::max(ymax, px[i].y);
  }
  const int r0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
  const int r1 = std::min(cfg.size_px - 1, static_cast<int>(std::ceil(ymax)));

  std::vector<double> xs;
  for (int r = r0; r <= r1; ++r) {
    const double ry = r + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 & a = px[j];
      const Vec2 & b = px[i];
      if (a.y == b.y) {
        continue;
      }
      const double ylo = std::min(a.y, b.y);
      const double yhi = std::max(a.y, b.y);
      if (ry >= ylo && ry < yhi) {
        xs.push_back(a.x + (ry - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int c0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int c1 =
        std::min(cfg.size_px - 1, static_cast<int>(std::floor(xs[k + 1] - 0.5)));
      for (int c = c0; c <= c1; ++c) {
        paint(c, r);
      }
    }
  }

  // Tie pass: pixel centers exactly on an edge.
  auto paint_center = [&](double cx, double cy) {
    const double cc = cx - 0.5;
    const double rr = cy - 0.5;
    if (cc == std::floor(cc) && rr == std::floor(rr)) {
      const int c = static_cast<int>(cc);
      const int r = static_cast<int>(rr);
      if (c >= 0 && c < cfg.size_px && r >= 0 && r < cfg.size_px) {
        paint(c, r);
      }
    }
  };
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = px[j];
    const Vec2 & b = px[i];
    if (a.y == b.y) {
      const double rr = a.y - 0.5;
      if (rr == std::floor(rr)) {
        const int r = static_cast<int>(rr);
        if (r >= 0 && r < cfg.size_px) {
          const int c0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x, b.x) - 0.5)));
          const int c1 =
            std::min(cfg.size_px - 1, static_cast<int>(std::floor(std::max(a.x, b.x) - 0.5)));
          for (int c = c0; c <= c1; ++c) {
            paint(c, r);
          }
        }
      }
      continue;
    }
    const double ylo = std::min(a.y, b.y);
    const double yhi = std::max(a.y, b.y);
    const int rr0 = std::max(0, static_cast<int>(std::floor(ylo - 0.5)));
    const int rr1 = std::min(cfg.size_px - 1, static_cast<int>(std::ceil(yhi)));
    for (int r = rr0; r <= rr1; ++r) {
      const double ry = r + 0.5;
      if (ry < ylo || ry > yhi) {
        continue;
      }
      paint_center(a.x + (ry - a.y) * (b.x - a.x) / (b.y - a.y), ry);
    }
  }
}

template <typename PaintFn>
void stroke_polyline(
  const Polyline & line, double width, const RasterConfig & cfg, PaintFn && paint)
{
  if (line.size() < 2 || width <= 0.0) {
    return;
  }
  const double half = width / 2.0;
  double cmin = 1e300;
  double cmax = -1e300;
  double rmin = 1e300;
  double rmax = -1e300;
  const double pad = half / cfg.meters_per_pixel() + 1.0;
  for (const Vec2 & v : line) {
    const Vec2 p = cfg.world_to_pixel(v);
    cmin = std::min(cmin, p.x);
    cmax = std::max(cmax, p.x);
    rmin = std::min(rmin, p.y);
    rmax = std::max(rmax, p.y);
  }
  const int c0 = std::max(0, static_cast<int>(std::floor(cmin - pad)));
  const int c1 = std::min(cfg.size_px - 1, static_cast<int>(std::ceil(cmax + pad)));
  const int r0 = std::max(0, static_cast<int>(std::floor(rmin - pad)));
  const int r1 = std::min(cfg.size_px - 1, static_cast<int>(std::ceil(rmax + pad)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Vec2 w = cfg.pixel_center_world(c, r);
      if (point_polyline_distance(w, line) <= half) {
        paint(c, r);
      }
    }
  }
}

}  // namespace

std::string layer_kind_name(LayerKind k)
{
  switch (k) {
    case LayerKind::kDrivable:
      return "drivable";
    case LayerKind::kLane:
      return "lane";
    case LayerKind::kPedCrossing:
      return "ped_crossing";
    case LayerKind::kWalkway:
      return "walkway";
    case LayerKind::kAgents:
      return "agents";
  }
  return "unknown";
}

LayerKind layer_kind_from_name(const std::string & name)
{
  for (LayerKind k : kAllLayerKinds) {
    if (layer_kind_name(k) == name) {
      return k;
    }
  }
  throw ArgumentError("unknown layer kind: " + name);
}

std::string LayerSpec::name() const
{
  std::string out;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i > 0) {
      out += '+';
    }
    out += layer_kind_name(kinds[i]);
  }
  return out;
}

void LayerSpec::validate() const
{
  if (kinds.empty()) {
    throw ArgumentError("layer spec has an empty kinds list");
  }
  std::set<LayerKind> seen;
  for (LayerKind k : kinds) {
    if (!seen.insert(k).second) {
      throw ArgumentError("layer spec has duplicate kind " + layer_kind_name(k));
    }
  }
}

std::vector<LayerSpec> default_layer_specs()
{
  // Static kinds first so agents overwrite them where boxes overlap.
  return {
    LayerSpec{{LayerKind::kDrivable, LayerKind::kLane}},
    LayerSpec{{LayerKind::kLane, LayerKind::kAgents}},
    LayerSpec{{LayerKind::kDrivable}},
    LayerSpec{{LayerKind::kAgents}},
  };
}

std::vector<LayerSpec> layer_specs_from_codes(const std::vector<int> & codes)
{
  const std::vector<LayerSpec> all = default_layer_specs();
  std::vector<LayerSpec> out;
  for (int code : codes) {
    if (code < 1 || code > static_cast<int>(all.size())) {
      throw ArgumentError("layer code out of range 1..4: " + std::to_string(code));
    }
    out.push_back(all[static_cast<std::size_t>(code - 1)]);
  }
  return out;
}

void RasterConfig::validate() const
{
  if (size_px < 8) {
    throw ConfigError("raster size_px must be >= 8");
  }
  if (!(extent_m > 0.0) || !std::isfinite(extent_m)) {
    throw ConfigError("raster extent_m must be positive and finite");
  }
  if (!std::isfinite(meters_per_pixel()) || meters_per_pixel() <= 0.0) {
    throw ConfigError("meters-per-pixel must be positive and finite");
  }
  if (
    !(target_offset.x >= 0.0 && target_offset.x <= 1.0) ||
    !(target_offset.y >= 0.0 && target_offset.y <= 1.0)) {
    throw ConfigError("target_offset components must lie in [0, 1]");
  }
  for (const auto & [kind, rgb] : color_table) {
    for (double v : rgb) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("color components must lie in [0, 1]");
      }
    }
  }
}

Vec2 RasterConfig::world_to_pixel(const Vec2 & p) const
{
  const double mpp = meters_per_pixel();
  return {target_offset.x * size_px - p.y / mpp, target_offset.y * size_px - p.x / mpp};
}

Vec2 RasterConfig::pixel_center_world(int col, int row) const
{
  const double mpp = meters_per_pixel();
  return {
    (target_offset.y * size_px - (row + 0.5)) * mpp,
    (target_offset.x * size_px - (col + 0.5)) * mpp};
}

Grid Grid::zeros(int size_px)
{
  Grid g;
  g.size = size_px;
  g.rgb.assign(static_cast<std::size_t>(size_px) * size_px * 3, 0.0);
  return g;
}

double & Grid::at(int col, int row, int ch)
{
  return rgb[(static_cast<std::size_t>(row) * size + col) * 3 + ch];
}

double Grid::at(int col, int row, int ch) const
{
  return rgb[(static_cast<std::size_t>(row) * size + col) * 3 + ch];
}

Grid rasterize_layer(const Scene & scene, const LayerSpec & spec, const RasterConfig & cfg)
{
  spec.validate();
  cfg.validate();
  Grid grid = Grid::zeros(cfg.size_px);
  for (LayerKind kind : spec.kinds) {
    const auto & color = cfg.color_table.at(kind);
    auto paint = [&grid, &color](int c, int r) {
      grid.at(c, r, 0) = color[0];
      grid.at(c, r, 1) = color[1];
      grid.at(c, r, 2) = color[2];
    };
    switch (kind) {
      case LayerKind::kDrivable:
        for (const Polygon & p : scene.drivable) {
          fill_polygon(p, cfg, paint);
        }
        break;
      case LayerKind::kLane:
        for (const Lane & lane : scene.lanes) {
          stroke_polyline(lane.points, lane.width, cfg, paint);
        }
        break;
      case LayerKind::kPedCrossing:
        for (const Polygon & p : scene.ped_crossings) {
          fill_polygon(p, cfg, paint);
        }
        break;
      case LayerKind::kWalkway:
        for (const Polygon & p : scene.walkways) {
          fill_polygon(p, cfg, paint);
        }
        break;
      case LayerKind::kAgents:
        for (const AgentState & a : scene.agents) {
          fill_polygon(oriented_box(a.position, a.heading, a.half_extent), cfg, paint);
        }
        break;
    }
  }
  return grid;
}

RasterStack build_stack(
  const Scene & scene, const std::vector<LayerSpec> & specs, const RasterConfig & cfg)
{
  if (specs.empty()) {
    throw ArgumentError("build_stack requires at least one layer spec");
  }
  RasterStack stack;
  stack.specs = specs;
  stack.layers.reserve(specs.size());
  for (const LayerSpec & spec : specs) {
    stack.layers.push_back(rasterize_layer(scene, spec, cfg));
  }
  return stack;
}

Mask drivable_mask(const Scene & scene, const RasterConfig & cfg)
{
  cfg.validate();
  Mask mask;
  mask.size = cfg.size_px;
  mask.bits.assign(static_cast<std::size_t>(cfg.size_px) * cfg.size_px, 0);
  auto paint = [&mask](int c, int r) {
    mask.bits[static_cast<std::size_t>(r) * mask.size + c] = 1;
  };
  for (const Polygon & p : scene.drivable) {
    fill_polygon(p, cfg, paint);
  }
  return mask;
}

std::string grid_to_ppm(const Grid & grid)
{
  std::string out = "P6\n" + std::to_string(grid.size) + " " + std::to_string(grid.size) + "\n255\n";
  out.reserve(out.size() + grid.rgb.size());
  for (double v : grid.rgb) {
    const double clamped = std::min(1.0, std::max(0.0, v));
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
  }
  return out;
}

void write_ppm(const std::string & path, const Grid & grid)
{
  write_file(path, grid_to_ppm(grid));
}

}  // namespace trajlab
