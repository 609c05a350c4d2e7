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

#include "pgmcts/input_layers.hpp"

#include "pgmcts/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pgmcts
{

namespace
{

void rasterize_polygon(Grid & grid, const Polyline & polygon)
{
  const GridSpec & spec = grid.spec;
  if (polygon.size() < 3) {
    return;
  }
  // Cell-center test restricted to the polygon's bounding box in grid coordinates.
  double r_lo = 1e18;
  double r_hi = -1e18;
  double c_lo = 1e18;
  double c_hi = -1e18;
  for (const Vec2 & p : polygon) {
    const Vec2 g = spec.to_grid(p);
    r_lo = std::min(r_lo, g.x());
    r_hi = std::max(r_hi, g.x());
    c_lo = std::min(c_lo, g.y());
    c_hi = std::max(c_hi, g.y());
  }
  const int r0 = std::max(0, static_cast<int>(std::floor(r_lo)));
  const int r1 = std::min(spec.rows - 1, static_cast<int>(std::ceil(r_hi)));
  const int c0 = std::max(0, static_cast<int>(std::floor(c_lo)));
  const int c1 = std::min(spec.cols - 1, static_cast<int>(std::ceil(c_hi)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (grid(r, c) == 0.0F && point_in_polygon(cell_to_world({r, c}, spec), polygon)) {
        grid(r, c) = 1.0F;
      }
    }
  }
}

void rasterize_lane(Grid & center, Grid & dir_cos, Grid & dir_sin, const Lane & lane, const GridSpec & spec)
{
  const double step = spec.resolution / 4.0;
  for (std::size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
    const Vec2 a = lane.centerline[i];
    const Vec2 b = lane.centerline[i + 1];
    const double len = (b - a).norm();
    const double rel = wrap_angle(std::atan2(b.y() - a.y(), b.x() - a.x()) - spec.origin.theta);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 0; k <= n; ++k) {
      const Vec2 p = a + (b - a) * (static_cast<double>(k) / n);
      if (const auto cell = world_to_cell(p, spec)) {
        center(cell->row, cell->col) = 1.0F;
        dir_cos(cell->row, cell->col) = static_cast<float>(std::cos(rel));
        dir_sin(cell->row, cell->col) = static_cast<float>(std::sin(rel));
      }
    }
  }
}

}  // namespace

InputLayers build_input_layers(
  const std::vector<VehicleState> & ego_history, const std::vector<AgentTrack> & agents,
  const LaneGraph & lanes, const DrivableArea & drivable, const Trajectory & proposal,
  const VehicleParams & ego, const GridSpec & spec, int pose_frames, int future_steps)
{
  if (static_cast<int>(ego_history.size()) != pose_frames) {
    throw Error(
      ErrorKind::LengthMismatch, "ego history has " + std::to_string(ego_history.size()) + " frames, expected " +
                                   std::to_string(pose_frames));
  }
  if (static_cast<int>(proposal.size()) != future_steps + 1) {
    throw Error(
      ErrorKind::LengthMismatch, "proposal has " + std::to_string(proposal.size()) + " states, expected " +
                                   std::to_string(future_steps + 1));
  }
  InputLayers layers;
  layers.pose_frames = pose_frames;
  layers.pose.assign(static_cast<std::size_t>(kPoseChannels * pose_frames), Grid(spec, GridSemantics::Binary));
  for (int f = 0; f < pose_frames; ++f) {
    const VehicleState & s = ego_history[static_cast<std::size_t>(f)];
    paint(layers.pose[static_cast<std::size_t>(f)],
      rasterize_footprint_spans(body_center(s, ego), ego.dims(), spec), 1.0F);
  }
  for (const AgentTrack & a : agents) {
    const int n = static_cast<int>(a.poses.size());
    for (int f = 0; f < pose_frames; ++f) {
      const int idx = n - pose_frames + f;
      if (idx < 0) {
        continue;
      }
      paint(layers.pose[static_cast<std::size_t>(pose_frames + f)],
        rasterize_footprint_spans(a.poses[static_cast<std::size_t>(idx)], a.dims, spec), 1.0F);
    }
  }

  layers.statics.reserve(kStaticChannels);
  layers.statics.emplace_back(spec, GridSemantics::Binary);
  layers.statics.emplace_back(spec, GridSemantics::Binary);
  layers.statics.emplace_back(spec, GridSemantics::Direction);
  layers.statics.emplace_back(spec, GridSemantics::Direction);
  for (const Polyline & poly : drivable.polygons) {
    rasterize_polygon(layers.statics[0], poly);
  }
  for (const Lane & lane : lanes.lanes()) {
    rasterize_lane(layers.statics[1], layers.statics[2], layers.statics[3], lane, spec);
  }

  layers.ego.reserve(static_cast<std::size_t>(future_steps));
  for (int t = 1; t <= future_steps; ++t) {
    layers.ego.push_back(rasterize_footprint(body_center(proposal[static_cast<std::size_t>(t)], ego), ego.dims(), spec));
  }
  return layers;
}

}  // namespace pgmcts
