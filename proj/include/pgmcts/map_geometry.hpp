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

#ifndef PGMCTS__MAP_GEOMETRY_HPP_
#define PGMCTS__MAP_GEOMETRY_HPP_

#include "pgmcts/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pgmcts
{

using LaneId = std::int64_t;

struct Lane
{
  LaneId id = 0;
  Polyline centerline;
  std::vector<LaneId> successors;
  std::optional<LaneId> left;
  std::optional<LaneId> right;
  std::optional<double> speed_limit;
};

/// Lanes sorted by id. Construction validates ids, centerlines and links
/// (throws FormatError).
class LaneGraph
{
public:
  LaneGraph() = default;
  explicit LaneGraph(std::vector<Lane> lanes);

  const std::vector<Lane> & lanes() const { return lanes_; }
  const Lane * find(LaneId id) const;
  const Lane & at(LaneId id) const;  // throws UnknownLane

private:
  std::vector<Lane> lanes_;
};

/// Polygons are stored counterclockwise.
struct DrivableArea
{
  std::vector<Polyline> polygons;
};

/// Validates simplicity and normalizes winding. Throws FormatError.
DrivableArea make_drivable_area(std::vector<Polyline> polygons);

struct Route
{
  std::vector<LaneId> lane_ids;
  std::vector<Pose2> waypoints;
  std::vector<double> arc_lengths;  // cumulative, arc_lengths[0] == 0
  double total_length = 0.0;
  std::optional<double> speed_limit;  // smallest limit along the route, if any lane has one
};

struct RouteProjection
{
  double arc_length = 0.0;
  double lateral_offset = 0.0;  // positive to the left of travel
};

inline constexpr double kDefaultWaypointSpacing = 1.0;

/// Shortest lane sequence by total centerline length, ties broken by
/// lexicographically smaller lane-id sequence.
Route extract_route(
  const LaneGraph & graph, LaneId start_lane, LaneId goal_lane,
  double spacing = kDefaultWaypointSpacing);

/// Builds a route from an explicit lane sequence (consecutive lanes must be linked).
Route make_route(
  const LaneGraph & graph, const std::vector<LaneId> & lane_ids,
  double spacing = kDefaultWaypointSpacing);

/// Route that starts at `lane` and follows the first listed successor.
Route follow_lane(const LaneGraph & graph, LaneId lane, int max_lanes = 16,
  double spacing = kDefaultWaypointSpacing);

RouteProjection project_to_route(const Vec2 & point, const Route & route);

/// Interpolated pose at arc length s; beyond either end the route is extended
/// along its terminal heading.
Pose2 route_pose_at(const Route & route, double s);

bool point_in_polygon(const Vec2 & point, const Polyline & polygon);
bool point_in_drivable(const Vec2 & point, const DrivableArea & area);

}  // namespace pgmcts

#endif  // PGMCTS__MAP_GEOMETRY_HPP_
