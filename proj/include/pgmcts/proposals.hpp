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

#ifndef PGMCTS__PROPOSALS_HPP_
#define PGMCTS__PROPOSALS_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/map_geometry.hpp"
#include "pgmcts/raster.hpp"

#include <string>
#include <vector>

namespace pgmcts
{

/// K candidate ego trajectories, each starting at the current ego state, with
/// non-negative scores summing to one.
struct ProposalSet
{
  std::vector<Trajectory> modes;
  std::vector<double> scores;
  std::vector<std::string> labels;

  std::size_t size() const { return modes.size(); }
};

struct ProposalParams
{
  int count = 3;
  int steps = kFutureSteps;
  double dt = kTickSeconds;
  double lookahead_min = 5.0;
  double lookahead_gain = 1.0;  // seconds of travel
  double accel_mode = 1.0;
  double decel_mode = -1.5;
  double fallback_speed_limit = 13.9;
  double start_position_tol = 0.5;
  double start_heading_tol = 0.1;
  double feasibility_tol = 0.1;
  double d_max = 10.0;
};

/// Per-tick reference controls of a trajectory: entry t is the control that
/// produced state t + 1.
std::vector<Control> reference_controls(const Trajectory & traj);

/// Pure-pursuit steering toward the route point one lookahead ahead.
double pure_pursuit_steer(const VehicleState & state, const Route & route, double wheelbase, const ProposalParams & p);

/// Follows `route` while commanding `accel` each tick; positive values stop at
/// `target_speed`, negative values stop at zero.
Trajectory track_route(
  const VehicleState & state, const Route & route, const VehicleParams & params, double accel,
  double target_speed, const ProposalParams & p = {});

/// Modes in order: accelerate toward the speed limit, hold speed, decelerate.
/// With K > 3, hold-speed modes on the left and right neighbor lanes (when
/// `graph` is given and they exist) come next, then further speed profiles.
/// Throws EmptyRoute.
ProposalSet sample_centerline_proposals(
  const VehicleState & state, const Route & route, const VehicleParams & params, int count,
  const ProposalParams & p = {}, const LaneGraph * graph = nullptr);

/// Re-simulates each mode from `state` with controls recovered from the file
/// states; the result replaces the file states. Throws FormatError,
/// StartMismatch, Infeasible.
ProposalSet load_proposals(
  const std::string & path, const VehicleState & state, const VehicleParams & params,
  const ProposalParams & p = {});

/// Same validation on an in-memory set of (x, y, theta, v) rows.
ProposalSet reconstruct_proposals(
  const std::vector<std::vector<Pose2>> & poses, const std::vector<std::vector<double>> & speeds,
  const std::vector<double> & scores, const VehicleState & state, const VehicleParams & params,
  const ProposalParams & p = {});

void save_proposals(const std::string & path, const ProposalSet & set);

/// Normalized distance fields; maps[i] belongs to the proposal state at time
/// (i + 1) * dt and holds min(dist, d_max) / d_max.
struct DeviationMaps
{
  std::vector<Grid> maps;
  double d_max = 10.0;

  std::size_t size() const { return maps.size(); }
};

/// Throws FootprintOffGrid when a footprint has no cell on the grid and
/// LengthMismatch when the mode has fewer than steps + 1 states.
DeviationMaps build_deviation_maps(
  const Trajectory & mode, const VehicleParams & params, const GridSpec & spec, double d_max = 10.0,
  int steps = kFutureSteps);

/// In-place variant that reuses the grids already held by `out`.
void build_deviation_maps(
  const Trajectory & mode, const VehicleParams & params, const GridSpec & spec, double d_max, int steps,
  DeviationMaps & out);

}  // namespace pgmcts

#endif  // PGMCTS__PROPOSALS_HPP_
