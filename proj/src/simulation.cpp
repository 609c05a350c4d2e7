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

#include "pgmcts/simulation.hpp"

#include "pgmcts/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

namespace pgmcts
{

void validate(const IdmParams & p)
{
  const bool ok = (!p.desired_speed || *p.desired_speed > 0.0) && p.fallback_speed > 0.0 &&
                  p.time_headway > 0.0 && p.min_gap > 0.0 && p.accel_max > 0.0 && p.comfortable_decel > 0.0 &&
                  p.decel_floor < 0.0 && p.leader_lateral_band > 0.0;
  if (!ok) {
    throw Error(ErrorKind::FormatError, "IDM parameters must be positive");
  }
}

double idm_accel(double v, std::optional<double> gap, double v_lead, double v0, const IdmParams & p)
{
  const double free = 1.0 - std::pow(v / v0, 4.0);
  if (!gap) {
    return p.accel_max * free;
  }
  const double dv = v - v_lead;
  const double s_star =
    p.min_gap + std::max(0.0, v * p.time_headway + v * dv / (2.0 * std::sqrt(p.accel_max * p.comfortable_decel)));
  const double ratio = s_star / *gap;
  return p.accel_max * (free - ratio * ratio);
}

std::string to_string(SimMode mode) { return mode == SimMode::Reactive ? "r" : "nr"; }

SimMode parse_sim_mode(const std::string & text)
{
  if (text == "nr") {
    return SimMode::NonReactive;
  }
  if (text == "r") {
    return SimMode::Reactive;
  }
  throw Error(ErrorKind::FormatError, "simulation mode must be 'nr' or 'r', got '" + text + "'");
}

int Scenario::ticks() const { return static_cast<int>(std::llround(duration / dt)); }

void validate(const Scenario & scn, SimMode mode)
{
  const int n = scn.ticks();
  if (!(scn.duration > 0.0) || std::abs(n * scn.dt - scn.duration) > 1e-9) {
    throw Error(ErrorKind::ScenarioInvalid, scn.id + ": duration must be a positive multiple of 0.1 s");
  }
  if (scn.route.waypoints.size() < 2) {
    throw Error(ErrorKind::ScenarioInvalid, scn.id + ": ego route is empty");
  }
  for (const ScenarioAgent & a : scn.agents) {
    if (!(a.dims.length > 0.0) || !(a.dims.width > 0.0)) {
      throw Error(ErrorKind::ScenarioInvalid, scn.id + ": agent " + a.id + " has non-positive dims");
    }
    const bool replay = mode == SimMode::NonReactive || !a.lane;
    const std::size_t need = replay ? static_cast<std::size_t>(n) + 1 : 1;
    if (a.log.size() < need) {
      throw Error(
        ErrorKind::ScenarioInvalid, scn.id + ": agent " + a.id + " logs " + std::to_string(a.log.size()) +
                                      " poses, needs " + std::to_string(need));
    }
    if (a.lane && scn.lanes.find(*a.lane) == nullptr) {
      throw Error(ErrorKind::ScenarioInvalid, scn.id + ": agent " + a.id + " references an unknown lane");
    }
  }
  if (scn.reference && scn.reference->size() < 1) {
    throw Error(ErrorKind::ScenarioInvalid, scn.id + ": reference trajectory is empty");
  }
}

std::optional<int> collision_check(
  const Trajectory & ego, const VehicleParams & params, const std::vector<std::vector<Pose2>> & agent_poses,
  const std::vector<BoxDims> & agent_dims)
{
  const std::size_t n = std::min(ego.size(), agent_poses.size());
  for (std::size_t t = 0; t < n; ++t) {
    const OrientedBox e = body_box(ego[t], params);
    const auto & poses = agent_poses[t];
    for (std::size_t a = 0; a < poses.size() && a < agent_dims.size(); ++a) {
      if (boxes_intersect(e, OrientedBox{poses[a], agent_dims[a]})) {
        return static_cast<int>(t);
      }
    }
  }
  return std::nullopt;
}

double offroad_fraction(const Trajectory & traj, const DrivableArea & area)
{
  if (traj.size() == 0) {
    return 0.0;
  }
  std::size_t outside = 0;
  for (const VehicleState & s : traj.states) {
    if (!point_in_drivable(s.position(), area)) {
      ++outside;
    }
  }
  return static_cast<double>(outside) / static_cast<double>(traj.size());
}

double progress_ratio(const Trajectory & planned, const Trajectory & reference, const Route & route)
{
  if (planned.size() == 0 || reference.size() == 0) {
    throw Error(ErrorKind::FormatError, "progress needs non-empty trajectories");
  }
  auto arc = [&](const Trajectory & t) {
    return project_to_route(t.states.back().position(), route).arc_length -
           project_to_route(t.states.front().position(), route).arc_length;
  };
  const double ref = arc(reference);
  if (ref < 0.5) {
    return 1.0;
  }
  return std::clamp(arc(planned) / ref, 0.0, 1.0);
}

std::vector<AgentTrack> agent_history(
  const Scenario & scn, const std::vector<std::vector<Pose2>> & poses, int tick, int frames)
{
  std::vector<AgentTrack> out;
  out.reserve(scn.agents.size());
  for (std::size_t a = 0; a < scn.agents.size(); ++a) {
    const ScenarioAgent & src = scn.agents[a];
    AgentTrack track;
    track.id = src.id;
    track.dims = src.dims;
    track.lane = src.lane;
    const Pose2 & first = poses.front()[a];
    const Vec2 back = heading_vector(first.theta) * (src.speed * scn.dt);
    for (int k = tick - frames + 1; k <= tick; ++k) {
      if (k >= 0) {
        track.poses.push_back(poses[static_cast<std::size_t>(k)][a]);
      } else {
        const Vec2 p = first.position() + back * k;
        track.poses.push_back({p.x(), p.y(), first.theta});
      }
    }
    if (track.poses.size() >= 2) {
      const auto & p = track.poses;
      track.speed = (p.back().position() - p[p.size() - 2].position()).norm() / scn.dt;
    } else {
      track.speed = src.speed;
    }
    out.push_back(std::move(track));
  }
  return out;
}

std::vector<VehicleState> ego_history(const Trajectory & executed, int tick, int frames)
{
  std::vector<VehicleState> out;
  const VehicleState & first = executed.states.front();
  for (int k = tick - frames + 1; k <= tick; ++k) {
    if (k >= 0) {
      out.push_back(executed[static_cast<std::size_t>(k)]);
    } else {
      VehicleState s = first;
      const Vec2 p = first.position() + heading_vector(first.theta) * (first.v * executed.dt * k);
      s.x = p.x();
      s.y = p.y();
      out.push_back(s);
    }
  }
  return out;
}

Trajectory default_reference(const Scenario & scn)
{
  Trajectory ref;
  ref.dt = scn.dt;
  const double s0 = project_to_route(scn.ego.position(), scn.route).arc_length;
  for (int k = 0; k <= scn.ticks(); ++k) {
    const Pose2 p = route_pose_at(scn.route, s0 + scn.ego.v * scn.dt * k);
    VehicleState s;
    s.x = p.x;
    s.y = p.y;
    s.theta = p.theta;
    s.v = scn.ego.v;
    ref.states.push_back(s);
  }
  return ref;
}

Metrics compute_metrics(const Scenario & scn, const SimResult & result)
{
  Metrics m;
  std::vector<BoxDims> dims;
  for (const ScenarioAgent & a : scn.agents) {
    dims.push_back(a.dims);
  }
  m.collision_tick = collision_check(result.ego, scn.ego_params, result.agent_poses, dims);
  m.collision = m.collision_tick.has_value();
  m.offroad_fraction = offroad_fraction(result.ego, scn.drivable);
  Trajectory ref = scn.reference ? *scn.reference : default_reference(scn);
  if (ref.size() > result.ego.size()) {
    ref.states.resize(result.ego.size());
  }
  m.progress_ratio = progress_ratio(result.ego, ref, scn.route);
  m.ticks = static_cast<int>(result.ego.size()) - 1;
  return m;
}

namespace
{

struct LaneFollower
{
  bool active = false;
  Route route;
  double s = 0.0;
  double v = 0.0;
  double v0 = 0.0;
};

struct Entity
{
  Pose2 center;
  double length = 0.0;
  double speed = 0.0;
};

ProposalSet make_proposals(
  const Scenario & scn, const SimConfig & config, const VehicleState & ego, int tick)
{
  const std::string & src = config.proposal_source;
  if (src == "sampler") {
    return sample_centerline_proposals(
      ego, scn.route, scn.ego_params, config.proposals.count, config.proposals, &scn.lanes);
  }
  if (src.rfind("file:", 0) == 0) {
    std::filesystem::path p(src.substr(5));
    if (std::filesystem::is_directory(p)) {
      p /= "tick_" + std::to_string(tick) + ".json";
    }
    return load_proposals(p.string(), ego, scn.ego_params, config.proposals);
  }
  throw Error(ErrorKind::FormatError, "unknown proposal source '" + src + "' (sampler, file:<path>)");
}

}  // namespace

SimResult run_closed_loop(const Scenario & scn, const SimConfig & config)
{
  const SimMode mode = config.mode_override.value_or(scn.mode);
  validate(scn, mode);
  validate(config.planner);
  validate(scn.idm);
  validate(config.grid);

  SimResult result;
  result.scenario_id = scn.id;
  result.mode = mode;
  result.ego.dt = scn.dt;
  result.ego.states.push_back(scn.ego);

  const std::size_t n_agents = scn.agents.size();
  std::vector<Pose2> current(n_agents);
  std::vector<double> speeds(n_agents);
  std::vector<LaneFollower> followers(n_agents);
  std::vector<BoxDims> dims;
  for (std::size_t a = 0; a < n_agents; ++a) {
    const ScenarioAgent & src = scn.agents[a];
    dims.push_back(src.dims);
    current[a] = src.log.front();
    speeds[a] = src.speed;
    if (mode == SimMode::Reactive && src.lane) {
      LaneFollower & f = followers[a];
      f.active = true;
      f.route = follow_lane(scn.lanes, *src.lane);
      f.s = project_to_route(src.log.front().position(), f.route).arc_length;
      f.v = src.speed;
      const Lane & lane = scn.lanes.at(*src.lane);
      f.v0 = scn.idm.desired_speed.value_or(lane.speed_limit.value_or(scn.idm.fallback_speed));
      current[a] = route_pose_at(f.route, f.s);
    }
  }
  result.agent_poses.push_back(current);
  result.agent_speeds.push_back(speeds);

  const auto predictor = make_predictor(config.predictor, config.occupancy);
  std::vector<OccupancySequence> occ;
  std::vector<DeviationMaps> dev;
  const int n_ticks = scn.ticks();
  bool collided = collision_check(result.ego, scn.ego_params, result.agent_poses, dims).has_value();

  for (int tick = 0; tick < n_ticks && !collided; ++tick) {
    const auto started = std::chrono::steady_clock::now();
    const VehicleState ego = result.ego.states.back();
    PlanResult planned;
    ProposalSet proposals;
    try {
      GridSpec spec = config.grid;
      spec.origin = ego.pose();
      proposals = make_proposals(scn, config, ego, tick);
      const std::vector<AgentTrack> tracks = agent_history(scn, result.agent_poses, tick);
      occ.resize(proposals.size());
      dev.resize(proposals.size());
      for (std::size_t m = 0; m < proposals.size(); ++m) {
        predictor->predict_into(
          tracks, proposals.modes[m], scn.ego_params, spec, {tick, static_cast<int>(m)}, occ[m]);
        build_deviation_maps(
          proposals.modes[m], scn.ego_params, spec, config.proposals.d_max, config.planner.steps, dev[m]);
      }
      PlannerConfig pc = config.planner;
      pc.seed = derive_seed(config.seed, static_cast<std::uint64_t>(tick));
      planned = plan(ego, proposals, occ, dev, scn.ego_params, pc);
    } catch (const Error & e) {
      result.aborted = true;
      result.error = scn.id + " tick " + std::to_string(tick) + ": " + e.what();
      break;
    }

    TickLog log;
    log.tick = tick;
    log.mode = planned.mode;
    log.cost = planned.cost;
    for (const ModeStats & s : planned.stats) {
      log.mode_costs.push_back(s.best_cost);
    }
    if (config.record_frames) {
      log.plan = planned.trajectory;
      log.proposals = proposals.modes;
    }
    log.rollouts = std::move(planned.rollouts);
    result.ticks.push_back(std::move(log));
    const VehicleState next_ego = planned.trajectory[1];

    // Agents react to the ego state at the start of the tick.
    std::vector<Entity> entities;
    entities.push_back({body_center(ego, scn.ego_params), scn.ego_params.length, ego.v});
    for (std::size_t a = 0; a < n_agents; ++a) {
      entities.push_back({current[a], dims[a].length, speeds[a]});
    }
    std::vector<Pose2> next(n_agents);
    std::vector<double> next_speed(n_agents);
    for (std::size_t a = 0; a < n_agents; ++a) {
      LaneFollower & f = followers[a];
      if (!f.active) {
        const auto & lg = scn.agents[a].log;
        const std::size_t k = std::min(lg.size() - 1, static_cast<std::size_t>(tick) + 1);
        next[a] = lg[k];
        next_speed[a] = (lg[k].position() - current[a].position()).norm() / scn.dt;
        continue;
      }
      std::optional<double> gap;
      double v_lead = 0.0;
      for (std::size_t e = 0; e < entities.size(); ++e) {
        if (e == a + 1) {
          continue;
        }
        const RouteProjection pr = project_to_route(entities[e].center.position(), f.route);
        const double ds = pr.arc_length - f.s;
        if (ds <= 0.0 || std::abs(pr.lateral_offset) > scn.idm.leader_lateral_band) {
          continue;
        }
        const double g = ds - 0.5 * (dims[a].length + entities[e].length);
        if (!gap || g < *gap) {
          gap = g;
          const Pose2 here = route_pose_at(f.route, pr.arc_length);
          v_lead = std::max(0.0, entities[e].speed * std::cos(entities[e].center.theta - here.theta));
        }
      }
      if (gap) {
        gap = std::max(*gap, 1e-3);
      }
      const double acc =
        std::clamp(idm_accel(f.v, gap, v_lead, f.v0, scn.idm), scn.idm.decel_floor, scn.idm.accel_max);
      const double v_new = std::max(0.0, f.v + acc * scn.dt);
      f.s += 0.5 * (f.v + v_new) * scn.dt;
      f.v = v_new;
      next[a] = route_pose_at(f.route, f.s);
      next_speed[a] = v_new;
    }
    current = next;
    speeds = next_speed;
    result.ego.states.push_back(next_ego);
    result.agent_poses.push_back(current);
    result.agent_speeds.push_back(speeds);
    const auto finished = std::chrono::steady_clock::now();
    result.latency_ms.push_back(std::chrono::duration<double, std::milli>(finished - started).count());

    std::vector<std::vector<Pose2>> last{current};
    Trajectory last_ego;
    last_ego.states.push_back(next_ego);
    collided = collision_check(last_ego, scn.ego_params, last, dims).has_value();
  }
  result.metrics = compute_metrics(scn, result);
  return result;
}

}  // namespace pgmcts
