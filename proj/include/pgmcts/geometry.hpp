// Copyright 2026 The pgmcts Authors
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

#ifndef PGMCTS__GEOMETRY_HPP_
#define PGMCTS__GEOMETRY_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace pgmcts
{

using Vec2 = Eigen::Vector2d;
using Polyline = std::vector<Vec2>;

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar angle)
{
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * pi;
  angle = std::fmod(angle + pi, two_pi);
  if (angle < 0) {
    angle += two_pi;
  }
  angle -= pi;
  // fmod maps +pi onto -pi; the range is closed at +pi.
  if (angle <= -pi) {
    angle += two_pi;
  }
  return angle;
}

inline Vec2 heading_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// z-component of the 2D cross product.
inline double cross(const Vec2 & a, const Vec2 & b) { return a.x() * b.y() - a.y() * b.x(); }

struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct BoxDims
{
  double length = 4.8;
  double width = 2.0;
};

/// Oriented rectangle given by its center pose and dimensions.
struct OrientedBox
{
  Pose2 center;
  BoxDims dims;

  std::array<Vec2, 4> corners() const
  {
    const Vec2 f = heading_vector(center.theta) * (dims.length / 2.0);
    const Vec2 l = Vec2(-std::sin(center.theta), std::cos(center.theta)) * (dims.width / 2.0);
    const Vec2 c = center.position();
    return {c + f + l, c - f + l, c - f - l, c + f - l};
  }
};

/// Separating-axis test for two oriented rectangles. Touching boxes intersect.
inline bool boxes_intersect(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {
    heading_vector(a.center.theta), heading_vector(a.center.theta + std::numbers::pi / 2.0),
    heading_vector(b.center.theta), heading_vector(b.center.theta + std::numbers::pi / 2.0)};
  for (const Vec2 & axis : axes) {
    double amin = ca[0].dot(axis), amax = amin;
    double bmin = cb[0].dot(axis), bmax = bmin;
    for (int i = 1; i < 4; ++i) {
      const double pa = ca[i].dot(axis);
      const double pb = cb[i].dot(axis);
      amin = std::min(amin, pa);
      amax = std::max(amax, pa);
      bmin = std::min(bmin, pb);
      bmax = std::max(bmax, pb);
    }
    if (amax < bmin || bmax < amin) {
      return false;
    }
  }
  return true;
}

inline double polyline_length(const Polyline & line)
{
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    total += (line[i] - line[i - 1]).norm();
  }
  return total;
}

/// Shoelace signed area; positive for counterclockwise winding.
inline double signed_area(const Polyline & polygon)
{
  double area = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    area += cross(polygon[i], polygon[(i + 1) % n]);
  }
  return area / 2.0;
}

inline double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) {
    return (p - a).norm();
  }
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/// Proper or touching intersection of closed segments [p1,p2] and [q1,q2].
inline bool segments_intersect(const Vec2 & p1, const Vec2 & p2, const Vec2 & q1, const Vec2 & q2)
{
  auto orient = [](const Vec2 & a, const Vec2 & b, const Vec2 & c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](const Vec2 & a, const Vec2 & b, const Vec2 & c) {
    return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
  };
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) {
    return true;
  }
  return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2)) ||
         (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
}

}  // namespace pgmcts

#endif  // PGMCTS__GEOMETRY_HPP_
