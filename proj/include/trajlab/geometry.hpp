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
// 2D primitives for scenes: points, polygons, polylines, rigid transforms.

#ifndef TRAJLAB__GEOMETRY_HPP_
#define TRAJLAB__GEOMETRY_HPP_

#include <cmath>
#include <limits>
#include <vector>

namespace trajlab
{

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2
{
  double x{0.0};
  double y{0.0};

  Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2 & o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }

  friend bool operator==(const Vec2 &, const Vec2 &) = default;
};

using Polygon = std::vector<Vec2>;
using Polyline = std::vector<Vec2>;

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a)
{
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

/// Rigid transform p -> R(angle) * p + t.
struct SE2
{
  double c{1.0};
  double s{0.0};
  Vec2 t{};

  static SE2 from(double angle, Vec2 translation)
  {
    return {std::cos(angle), std::sin(angle), translation};
  }

  Vec2 apply(const Vec2 & p) const
  {
    return {c * p.x - s * p.y + t.x, s * p.x + c * p.y + t.y};
  }
};

/// Signed shoelace area (positive for counter-clockwise vertex order).
inline double polygon_signed_area(const Polygon & poly)
{
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & p = poly[i];
    const Vec2 & q = poly[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

inline double polygon_area(const Polygon & poly)
{
  return std::abs(polygon_signed_area(poly));
}

/// True if p lies on the closed segment [a, b].
inline bool on_segment(const Vec2 & p, const Vec2 & a, const Vec2 & b, double eps = 1e-12)
{
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (std::abs(cross) > eps * (1.0 + (b - a).norm())) {
    return false;
  }
  const double d = (p - a).dot(b - a);
  return d >= -eps && d <= (b - a).dot(b - a) + eps;
}

/// Even-odd point-in-polygon test, boundary counts as inside.
inline bool point_in_polygon(const Vec2 & p, const Polygon & poly)
{
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = poly[j];
    const Vec2 & b = poly[i];
    if (on_segment(p, a, b)) {
      return true;
    }
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

/// Distance from p to the closed segment [a, b].
inline double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 d = b - a;
  const double len2 = d.dot(d);
  if (len2 <= 0.0) {
    return (p - a).norm();
  }
  double t = (p - a).dot(d) / len2;
  t = std::fmin(1.0, std::fmax(0.0, t));
  return (p - (a + d * t)).norm();
}

/// Distance from p to a polyline (min over segments).
inline double point_polyline_distance(const Vec2 & p, const Polyline & line)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::fmin(best, point_segment_distance(p, line[i], line[i + 1]));
  }
  return best;
}

/// Corners of an oriented box centered at `center` with heading `angle`.
/// half_extent.x is the half length along the heading, half_extent.y the
/// half width to the left.
inline Polygon oriented_box(const Vec2 & center, double angle, const Vec2 & half_extent)
{
  const SE2 tf = SE2::from(angle, center);
  const double hx = half_extent.x;
  const double hy = half_extent.y;
  return {
    tf.apply({hx, hy}),
    tf.apply({-hx, hy}),
    tf.apply({-hx, -hy}),
    tf.apply({hx, -hy}),
  };
}

}  // namespace trajlab

#endif  // TRAJLAB__GEOMETRY_HPP_
