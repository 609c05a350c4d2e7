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

#ifndef PGMCTS__INPUT_LAYERS_HPP_
#define PGMCTS__INPUT_LAYERS_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/map_geometry.hpp"
#include "pgmcts/occupancy.hpp"
#include "pgmcts/raster.hpp"

#include <vector>

namespace pgmcts
{

inline constexpr int kPoseChannels = 2;    // ego, others
inline constexpr int kStaticChannels = 4;  // drivable, centerline, direction cos, direction sin

/// Raster inputs of a learned occupancy predictor.
struct InputLayers
{
  int pose_frames = kHistoryFrames;
  std::vector<Grid> pose;    // channel * pose_frames + frame, binary
  std::vector<Grid> statics; // kStaticChannels grids
  std::vector<Grid> ego;     // ego[i] is the proposal footprint at time (i + 1) * dt

  const Grid & pose_at(int channel, int frame) const
  {
    return pose[static_cast<std::size_t>(channel * pose_frames + frame)];
  }
};

/// `ego_history` holds exactly `pose_frames` rear-axle states (oldest first);
/// agent histories are aligned on their last pose and frames they lack stay
/// empty. The proposal needs `future_steps + 1` states. Direction channels
/// hold the lane heading relative to the grid frame as cos/sin on centerline
/// cells and 0 elsewhere. Throws LengthMismatch.
InputLayers build_input_layers(
  const std::vector<VehicleState> & ego_history, const std::vector<AgentTrack> & agents,
  const LaneGraph & lanes, const DrivableArea & drivable, const Trajectory & proposal,
  const VehicleParams & ego, const GridSpec & spec, int pose_frames = kHistoryFrames,
  int future_steps = kFutureSteps);

}  // namespace pgmcts

#endif  // PGMCTS__INPUT_LAYERS_HPP_
