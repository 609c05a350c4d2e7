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

#ifndef PGMCTS__SIMULATION_HPP_
#define PGMCTS__SIMULATION_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/map_geometry.hpp"
#include "pgmcts/occupancy.hpp"
#include "pgmcts/planner.hpp"
#include "pgmcts/proposals.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pgmcts
{

struct IdmParams
{
  std::optional<double> desired_speed;  // lane speed limit, else fallback_speed
  double fallback_speed = 13.9;
  double time_headway = 1.5;
  double min_gap = 2.0;
  double accel_max = 1.5;
  double comfortable_decel = 2.0;
  double decel_floor = -9.0;
  double leader_lateral_band = 1.75;
};

/// Throws FormatError on non-positive parameters.
void validate(const IdmParams & p);

/// Standard IDM acceleration for desired speed v0. A missing leader means an
/// infinite gap.
double idm_accel(double v, std::optional<double> gap, double v_lead, double v0, const IdmParams & p);

enum class SimMode { NonReactive, Reactive };

std::string to_string(SimMode mode);
SimMode parse_sim_mode(const std::string & text);  // "nr" | "r", throws FormatError

struct ScenarioAgent
{
  std::string id;
  BoxDims dims;
  std::optional<LaneId> lane;
  double speed = 0.0;       // at tick 0
  std::vector<Pose2> log;   // box-center pose per tick, log[0] at t = 0
};

struct Scenario
{
  std::string id;
  SimMode mode = SimMode::NonReactive;
  double duration = 0.0;
  double dt = kTickSeconds;
  LaneGraph lanes;
  DrivableArea drivable;
  VehicleState ego;
  VehicleParams ego_params;
  LaneId route_start = 0;
  LaneId route_goal = 0;
  Route route;
  std::vector<ScenarioAgent> agents;
  std::optional<Trajectory> reference;  // ground-truth ego path for progress
  IdmParams idm;

  int ticks() const;
};

/// Checks the clock, agent logs and route. Throws ScenarioInvalid.
void validate(const Scenario & scn, SimMode mode);

struct Metrics
{
  bool collision = false;
  std::optional<int> collision_tick;
  double offroad_fraction = 0.0;
  double progress_ratio = 0.0;
  int ticks = 0;  // executed ego states minus one
};

struct TickLog
{
  int tick = 0;
  int mode = 0;
  double cost = 0.0;
  std::vector<double> mode_costs;
  Trajectory plan;                 // kept when frames are recorded
  std::vector<Trajectory> proposals;  // kept when frames are recorded
  std::vector<RolloutRecord> rollouts;  // kept when the planner logs rollouts
};

struct SimResult
{
  std::string scenario_id;
  SimMode mode = SimMode::NonReactive;
  Trajectory ego;                               // executed states, ego[0] is the initial state
  std::vector<std::vector<Pose2>> agent_poses;  // [tick][agent], box centers
  std::vector<std::vector<double>> agent_speeds;
  std::vector<TickLog> ticks;
  Metrics metrics;
  std::vector<double> latency_ms;  // wall clock per tick, not part of the metrics
  bool aborted = false;
  std::string error;
};

struct SimConfig
{
  PlannerConfig planner;
  ProposalParams proposals;
  OccupancyParams occupancy;
  std::string predictor = "ego-cond";
  std::string proposal_source = "sampler";  // or file:<path>
  std::optional<SimMode> mode_override;
  std::uint64_t seed = 0;
  bool record_frames = false;
  GridSpec grid;  // origin is replaced by the ego pose each tick
};

/// Earliest tick at which the ego body box intersects an agent box.
std::optional<int> collision_check(
  const Trajectory & ego, const VehicleParams & params, const std::vector<std::vector<Pose2>> & agent_poses,
  const std::vector<BoxDims> & agent_dims);

/// Share of states whose rear-axle point lies outside the drivable area.
double offroad_fraction(const Trajectory & traj, const DrivableArea & area);

/// Along-route progress of `planned` over `reference`, capped at 1.
double progress_ratio(const Trajectory & planned, const Trajectory & reference, const Route & route);

/// Agent poses for history frames tick-frames+1 .. tick. Frames before the
/// first logged pose are extrapolated backwards at the agent's initial speed.
std::vector<AgentTrack> agent_history(
  const Scenario & scn, const std::vector<std::vector<Pose2>> & poses, int tick, int frames = kHistoryFrames);

/// Ego history with the same backward extrapolation.
std::vector<VehicleState> ego_history(const Trajectory & executed, int tick, int frames = kHistoryFrames);

/// Reference ego trajectory used for progress when the scenario has none:
/// constant initial speed along the route.
Trajectory default_reference(const Scenario & scn);

/// Recomputes all metrics from the logged trajectories.
Metrics compute_metrics(const Scenario & scn, const SimResult & result);

/// Closed-loop episode with per-tick replanning; stops at the duration or at
/// the first collision. Planner errors end the run with `aborted` set.
SimResult run_closed_loop(const Scenario & scn, const SimConfig & config);

}  // namespace pgmcts

#endif  // PGMCTS__SIMULATION_HPP_
