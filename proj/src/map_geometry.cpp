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

#include "pgmcts/map_geometry.hpp"

#include "pgmcts/error.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

namespace pgmcts
{

LaneGraph::LaneGraph(std::vector<Lane> lanes) : lanes_(std::move(lanes))
{
  std::sort(lanes_.begin(), lanes_.end(), [](const Lane & a, const Lane & b) { return a.id < b.id; });
  for (std::size_t i = 1; i < lanes_.size(); ++i) {
    if (lanes_[i].id == lanes_[i - 1].id) {
      throw Error(ErrorKind::FormatError, "duplicate lane id " + std::to_string(lanes_[i].id));
    }
  }
  for (const Lane & lane : lanes_) {
    if (lane.centerline.size() < 2) {
      throw Error(ErrorKind::FormatError, "lane " + std::to_string(lane.id) + " has fewer than 2 points");
    }
    for (std::size_t i = 1; i < lane.centerline.size(); ++i) {
      if ((lane.centerline[i] - lane.centerline[i - 1]).norm() == 0.0) {
        throw Error(
          ErrorKind::FormatError, "lane " + std::to_string(lane.id) + " repeats a centerline point");
      }
    }
    for (LaneId succ : lane.successors) {
      if (find(succ) == nullptr) {
        throw Error(
          ErrorKind::FormatError,
          "lane " + std::to_string(lane.id) + " references missing successor " + std::to_string(succ));
      }
    }
  }
}

const Lane * LaneGraph::find(LaneId id) const
{
  auto it = std::lower_bound(
    lanes_.begin(), lanes_.end(), id, [](const Lane & lane, LaneId key) { return lane.id < key; });
  if (it == lanes_.end() || it->id != id) {
    return nullptr;
  }
  return &*it;
}

const Lane & LaneGraph::at(LaneId id) const
{
  const Lane * lane = find(id);
  if (lane == nullptr) {
    throw Error(ErrorKind::UnknownLane, "lane " + std::to_string(id));
  }
  return *lane;
}

DrivableArea make_drivable_area(std::vector<Polyline> polygons)
{
  DrivableArea area;
  for (Polyline & poly : polygons) {
    if (poly.size() >= 2 && (poly.front() - poly.back()).norm() == 0.0) {
      poly.pop_back();
    }
    if (poly.size() < 3) {
      throw Error(ErrorKind::FormatError, "drivable polygon needs at least 3 vertices");
    }
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
        if (adjacent) {
          continue;
        }
        if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
          throw Error(ErrorKind::FormatError, "drivable polygon is not simple");
        }
      }
    }
    if (signed_area(poly) < 0.0) {
      std::reverse(poly.begin(), poly.end());
    }
    area.polygons.push_back(std::move(poly));
  }
  return area;
}

namespace
{

Route resample(const LaneGraph & graph, const std::vector<LaneId> & lane_ids, double spacing)
{
  if (!(spacing > 0.0)) {
    throw Error(ErrorKind::FormatError, "waypoint spacing must be positive");
  }
  Polyline dense;
  std::optional<double> limit;
  for (LaneId id : lane_ids) {
    const Lane & lane = graph.at(id);
    for (const Vec2 & p : lane.centerline) {
      if (!dense.empty() && (p - dense.back()).norm() < 1e-9) {
        continue;
      }
      dense.push_back(p);
    }
    if (lane.speed_limit) {
      limit = limit ? std::min(*limit, *lane.speed_limit) : *lane.speed_limit;
    }
  }

  std::vector<double> cum(dense.size(), 0.0);
  for (std::size_t i = 1; i < dense.size(); ++i) {
    cum[i] = cum[i - 1] + (dense[i] - dense[i - 1]).norm();
  }
  const double length = cum.back();

  std::vector<double> samples;
  for (int k = 0;; ++k) {
    const double s = k * spacing;
    if (s >= length - 1e-9) {
      break;
    }
    samples.push_back(s);
  }
  samples.push_back(length);

  Route route;
  route.lane_ids = lane_ids;
  route.speed_limit = limit;
  std::size_t seg = 0;
  for (double s : samples) {
    while (seg + 2 < dense.size() && cum[seg + 1] <= s) {
      ++seg;
    }
    const Vec2 a = dense[seg];
    const Vec2 b = dense[seg + 1];
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = std::clamp((s - cum[seg]) / seg_len, 0.0, 1.0);
    const Vec2 p = a + t * (b - a);
    const Vec2 d = b - a;
    route.waypoints.push_back({p.x(), p.y(), std::atan2(d.y(), d.x())});
  }

  route.arc_lengths.assign(route.waypoints.size(), 0.0);
  for (std::size_t i = 1; i < route.waypoints.size(); ++i) {
    route.arc_lengths[i] = route.arc_lengths[i - 1] +
      (route.waypoints[i].position() - route.waypoints[i - 1].position()).norm();
  }
  route.total_length = route.arc_lengths.back();
  return route;
}

}  // namespace

Route make_route(const LaneGraph & graph, const std::vector<LaneId> & lane_ids, double spacing)
{
  if (lane_ids.empty()) {
    throw Error(ErrorKind::EmptyRoute, "route needs at least one lane");
  }
  for (std::size_t i = 0; i < lane_ids.size(); ++i) {
    const Lane & lane = graph.at(lane_ids[i]);
    if (i + 1 < lane_ids.size() &&
        std::find(lane.successors.begin(), lane.successors.end(), lane_ids[i + 1]) ==
          lane.successors.end())
    {
      throw Error(
        ErrorKind::NoRoute, "lane " + std::to_string(lane_ids[i]) + " does not lead to " +
                              std::to_string(lane_ids[i + 1]));
    }
  }
  return resample(graph, lane_ids, spacing);
}

Route extract_route(const LaneGraph & graph, LaneId start_lane, LaneId goal_lane, double spacing)
{
  graph.at(start_lane);
  graph.at(goal_lane);

  struct Label
  {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<LaneId> path;
    bool settled = false;
  };
  const auto & lanes = graph.lanes();
  std::vector<Label> labels(lanes.size());
  auto index_of = [&](LaneId id) {
    return static_cast<std::size_t>(graph.find(id) - lanes.data());
  };
  auto better = [](double ca, const std::vector<LaneId> & pa, double cb,
                   const std::vector<LaneId> & pb) {
    if (ca < cb - 1e-9) {
      return true;
    }
    if (ca > cb + 1e-9) {
      return false;
    }
    return pa < pb;
  };

  const std::size_t start = index_of(start_lane);
  labels[start].cost = polyline_length(lanes[start].centerline);
  labels[start].path = {start_lane};

  for (;;) {
    std::size_t best = lanes.size();
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      if (labels[i].settled || labels[i].path.empty()) {
        continue;
      }
      if (best == lanes.size() ||
          better(labels[i].cost, labels[i].path, labels[best].cost, labels[best].path))
      {
        best = i;
      }
    }
    if (best == lanes.size()) {
      break;
    }
    labels[best].settled = true;
    if (lanes[best].id == goal_lane) {
      return make_route(graph, labels[best].path, spacing);
    }
    for (LaneId succ : lanes[best].successors) {
      const std::size_t j = index_of(succ);
      if (labels[j].settled) {
        continue;
      }
      const double cost = labels[best].cost + polyline_length(lanes[j].centerline);
      std::vector<LaneId> path = labels[best].path;
      path.push_back(succ);
      if (labels[j].path.empty() || better(cost, path, labels[j].cost, labels[j].path)) {
        labels[j].cost = cost;
        labels[j].path = std::move(path);
      }
    }
  }
  throw Error(
    ErrorKind::NoRoute,
    "lane " + std::to_string(goal_lane) + " unreachable from " + std::to_string(start_lane));
}

Route follow_lane(const LaneGraph & graph, LaneId lane, int max_lanes, double spacing)
{
  std::vector<LaneId> ids{lane};
  std::set<LaneId> seen{lane};
  while (static_cast<int>(ids.size()) < max_lanes) {
    const Lane & current = graph.at(ids.back());
    if (current.successors.empty() || seen.count(current.successors.front()) != 0U) {
      break;
    }
    ids.push_back(current.successors.front());
    seen.insert(ids.back());
  }
  return make_route(graph, ids, spacing);
}

RouteProjection project_to_route(const Vec2 & point, const Route & route)
{
  const auto & wp = route.waypoints;
  if (wp.size() < 2) {
    return {0.0, wp.empty() ? 0.0 : (point - wp.front().position()).norm()};
  }
  double best_dist = std::numeric_limits<double>::infinity();
  RouteProjection best;
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
    const Vec2 a = wp[i].position();
    const Vec2 d = wp[i + 1].position() - a;
    const double len = d.norm();
    if (len == 0.0) {
      continue;
    }
    const Vec2 dir = d / len;
    const double t = std::clamp((point - a).dot(dir), 0.0, len);
    const Vec2 foot = a + t * dir;
    const double dist = (point - foot).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best.arc_length = route.arc_lengths[i] + t;
      best.lateral_offset = cross(dir, point - foot);
    }
  }
  return best;
}

Pose2 route_pose_at(const Route & route, double s)
{
  const auto & wp = route.waypoints;
  if (wp.size() == 1) {
    return wp.front();
  }
  if (s <= 0.0) {
    const Pose2 & p = wp.front();
    const Vec2 q = p.position() + s * heading_vector(p.theta);
    return {q.x(), q.y(), p.theta};
  }
  if (s >= route.total_length) {
    const Pose2 & p = wp.back();
    const Vec2 q = p.position() + (s - route.total_length) * heading_vector(p.theta);
    return {q.x(), q.y(), p.theta};
  }
  auto it = std::upper_bound(route.arc_lengths.begin(), route.arc_lengths.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - route.arc_lengths.begin()) - 1;
  const Vec2 a = wp[i].position();
  const Vec2 b = wp[i + 1].position();
  const double seg = route.arc_lengths[i + 1] - route.arc_lengths[i];
  const double t = seg > 0.0 ? (s - route.arc_lengths[i]) / seg : 0.0;
  const Vec2 p = a + t * (b - a);
  return {p.x(), p.y(), std::atan2(b.y() - a.y(), b.x() - a.x())};
}

bool point_in_polygon(const Vec2 & point, const Polyline & polygon)
{
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(point, polygon[i], polygon[(i + 1) % n]) <= 1e-9) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = polygon[i];
    const Vec2 & b = polygon[j];
    if ((a.y() > point.y()) != (b.y() > point.y())) {
      const double x_cross = a.x() + (point.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (point.x() < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

bool point_in_drivable(const Vec2 & point, const DrivableArea & area)
{
  return std::any_of(area.polygons.begin(), area.polygons.end(), [&](const Polyline & poly) {
    return point_in_polygon(point, poly);
  });
}

}  // namespace pgmcts
