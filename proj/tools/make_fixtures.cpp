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

// Writes the bundled scenario fixtures:
//   make_fixtures <scenario_dir> <conditioning_dir>

#include "pgmcts/proposals.hpp"
#include "pgmcts/scenario_io.hpp"
#include "pgmcts/simulation.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

namespace
{

using namespace pgmcts;

Polyline rectangle(double x0, double y0, double x1, double y1)
{
  return {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
}

Lane straight_lane(LaneId id, Vec2 a, Vec2 b, double speed_limit, std::vector<LaneId> successors = {})
{
  Lane l;
  l.id = id;
  l.centerline = {a, b};
  l.speed_limit = speed_limit;
  l.successors = std::move(successors);
  return l;
}

double smoothstep(double u)
{
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Ramp centerline y = -offset * (1 - smoothstep(x / length)) sampled every metre.
Lane ramp_lane(LaneId id, double offset, double length, double speed_limit, LaneId successor)
{
  Lane l;
  l.id = id;
  l.speed_limit = speed_limit;
  l.successors = {successor};
  const int n = static_cast<int>(std::round(length));
  for (int i = 0; i <= n; ++i) {
    const double x = length * i / n;
    l.centerline.emplace_back(x, -offset * (1.0 - smoothstep(x / length)));
  }
  return l;
}

Scenario base(const std::string & id, double duration)
{
  Scenario scn;
  scn.id = id;
  scn.mode = SimMode::NonReactive;
  scn.duration = duration;
  return scn;
}

void finish_route(Scenario & scn, LaneId start, LaneId goal)
{
  scn.route_start = start;
  scn.route_goal = goal;
  scn.route = extract_route(scn.lanes, start, goal);
}

Trajectory constant_speed_reference(const Scenario & scn, double speed)
{
  Trajectory ref;
  const double s0 = project_to_route(scn.ego.position(), scn.route).arc_length;
  for (int k = 0; k <= scn.ticks(); ++k) {
    const Pose2 p = route_pose_at(scn.route, s0 + speed * k * scn.dt);
    ref.states.push_back({p.x, p.y, p.theta, speed, 0.0, 0.0});
  }
  return ref;
}

std::vector<Pose2> constant_velocity_log(const Pose2 & start, double speed, int ticks, double dt)
{
  std::vector<Pose2> log;
  for (int k = 0; k <= ticks; ++k) {
    const Vec2 p = start.position() + heading_vector(start.theta) * (speed * k * dt);
    log.push_back({p.x(), p.y(), start.theta});
  }
  return log;
}

Scenario empty_road()
{
  // Free flow: the ego starts at the speed limit.
  Scenario scn = base("empty_road", 8.0);
  scn.lanes = LaneGraph({straight_lane(1, Vec2(-50.0, 0.0), Vec2(400.0, 0.0), 10.0)});
  scn.drivable = make_drivable_area({rectangle(-50.0, -3.5, 400.0, 3.5)});
  scn.ego = {0.0, 0.0, 0.0, 10.0, 0.0, 0.0};
  finish_route(scn, 1, 1);
  scn.reference = constant_speed_reference(scn, 10.0);
  return scn;
}

Scenario stopped_lead()
{
  Scenario scn = base("stopped_lead", 8.0);
  scn.lanes = LaneGraph({straight_lane(1, Vec2(-50.0, 0.0), Vec2(400.0, 0.0), 13.9)});
  scn.drivable = make_drivable_area({rectangle(-50.0, -3.5, 400.0, 3.5)});
  scn.ego = {10.0, 0.0, 0.0, 8.0, 0.0, 0.0};
  finish_route(scn, 1, 1);
  ScenarioAgent lead;
  lead.id = "stopped";
  lead.speed = 0.0;
  lead.log = constant_velocity_log({40.0, 0.0, 0.0}, 0.0, scn.ticks(), scn.dt);
  scn.agents.push_back(lead);

  // Reference: an IDM driver behind the stopped vehicle.
  Trajectory ref;
  VehicleState s = scn.ego;
  const double v0 = 13.9;
  for (int k = 0; k <= scn.ticks(); ++k) {
    ref.states.push_back(s);
    const double gap = lead.log[0].x - body_center(s, scn.ego_params).x - 0.5 * (scn.ego_params.length + lead.dims.length);
    const double a = std::clamp(idm_accel(s.v, gap, 0.0, v0, scn.idm), scn.idm.decel_floor, scn.idm.accel_max);
    const double v = std::max(0.0, s.v + a * scn.dt);
    s.x += 0.5 * (s.v + v) * scn.dt;
    s.v = v;
    s.accel = a;
  }
  scn.reference = ref;
  return scn;
}

Scenario crossing()
{
  Scenario scn = base("crossing", 8.0);
  const double speed = 5.0;
  const double t_enter = 4.6;  // agent reaches the ego lane strip
  scn.lanes = LaneGraph({straight_lane(1, Vec2(-50.0, 0.0), Vec2(400.0, 0.0), 10.0),
    straight_lane(2, Vec2(50.0, -100.0), Vec2(50.0, 100.0), speed)});
  scn.drivable =
    make_drivable_area({rectangle(-50.0, -3.5, 400.0, 3.5), rectangle(46.5, -100.0, 53.5, 100.0)});
  scn.ego = {0.0, 0.0, 0.0, 8.0, 0.0, 0.0};
  finish_route(scn, 1, 1);
  ScenarioAgent agent;
  agent.id = "crossing";
  agent.lane = 2;
  agent.speed = speed;
  // Box enters |y| <= 1 + width/2 of the ego lane when its center is at -3.4.
  const double y0 = -(1.0 + agent.dims.length / 2.0) - speed * t_enter;
  agent.log = constant_velocity_log({50.0, y0, M_PI / 2.0}, speed, scn.ticks(), scn.dt);
  scn.agents.push_back(agent);
  // Reference passes just behind the agent: ego front reaches x = 49 when it clears the lane.
  const double t_clear = t_enter + (2.0 + agent.dims.length) / speed;
  const double front = scn.ego_params.wheelbase / 2.0 + scn.ego_params.length / 2.0;
  scn.reference = constant_speed_reference(scn, (49.0 - front - scn.ego.x) / t_clear);
  return scn;
}

// Non-reactive log of an IDM vehicle on `lane` that reacts to `ego_ref`.
std::vector<Pose2> idm_log(
  const Scenario & scn, LaneId lane, double x_center, double speed, const Trajectory & ego_ref, std::vector<double> * speeds)
{
  const Route route = follow_lane(scn.lanes, lane);
  double s = project_to_route(Vec2(x_center, 0.0), route).arc_length;
  double v = speed;
  const double v0 = scn.lanes.at(lane).speed_limit.value_or(scn.idm.fallback_speed);
  std::vector<Pose2> log;
  for (int k = 0; k <= scn.ticks(); ++k) {
    log.push_back(route_pose_at(route, s));
    if (speeds != nullptr) {
      speeds->push_back(v);
    }
    const Pose2 ego_center = body_center(ego_ref[static_cast<std::size_t>(k)], scn.ego_params);
    const RouteProjection pr = project_to_route(ego_center.position(), route);
    std::optional<double> gap;
    double v_lead = 0.0;
    if (pr.arc_length > s && std::abs(pr.lateral_offset) <= scn.idm.leader_lateral_band) {
      gap = std::max(1e-3, pr.arc_length - s - scn.ego_params.length);
      const Pose2 here = route_pose_at(route, pr.arc_length);
      v_lead = std::max(0.0, ego_ref[static_cast<std::size_t>(k)].v * std::cos(ego_center.theta - here.theta));
    }
    const double a = std::clamp(idm_accel(v, gap, v_lead, v0, scn.idm), scn.idm.decel_floor, scn.idm.accel_max);
    const double vn = std::max(0.0, v + a * scn.dt);
    s += 0.5 * (v + vn) * scn.dt;
    v = vn;
  }
  return log;
}

Scenario merge_like(const std::string & id, double duration, double ramp_offset, double ramp_length,
  double ego_speed, double agent_x, double agent_speed)
{
  Scenario scn = base(id, duration);
  const double limit = 13.9;
  scn.lanes = LaneGraph({straight_lane(1, Vec2(-150.0, 0.0), Vec2(ramp_length, 0.0), limit, {2}),
    straight_lane(2, Vec2(ramp_length, 0.0), Vec2(500.0, 0.0), limit),
    ramp_lane(10, ramp_offset, ramp_length, limit, 2)});
  scn.drivable = make_drivable_area({rectangle(-150.0, -2.0, 500.0, 2.0),
    rectangle(-10.0, -ramp_offset - 2.0, ramp_length, 0.0)});
  scn.ego = {0.0, -ramp_offset, 0.0, ego_speed, 0.0, 0.0};
  finish_route(scn, 10, 2);
  ProposalParams p;
  p.steps = scn.ticks();
  scn.reference = track_route(scn.ego, scn.route, scn.ego_params, 0.0, ego_speed, p);
  for (VehicleState & s : scn.reference->states) {
    s.accel = 0.0;
    s.steer = 0.0;
  }
  ScenarioAgent agent;
  agent.id = "mainline";
  agent.lane = 1;
  agent.speed = agent_speed;
  agent.log = idm_log(scn, 1, agent_x, agent_speed, *scn.reference, nullptr);
  scn.agents.push_back(agent);
  return scn;
}

}  // namespace

int main(int argc, char ** argv)
{
  if (argc != 3) {
    std::cerr << "usage: make_fixtures <scenario_dir> <conditioning_dir>\n";
    return 2;
  }
  try {
    std::filesystem::create_directories(argv[1]);
    std::filesystem::create_directories(argv[2]);
    const std::filesystem::path dir(argv[1]);
    save_scenario((dir / "empty_road.json").string(), empty_road());
    save_scenario((dir / "stopped_lead.json").string(), stopped_lead());
    save_scenario((dir / "crossing.json").string(), crossing());
    save_scenario((dir / "merge.json").string(), merge_like("merge", 8.0, 10.0, 60.0, 10.0, -30.0, 11.0));
    save_scenario((std::filesystem::path(argv[2]) / "merge_conditioning.json").string(),
      merge_like("merge_conditioning", 3.0, 3.5, 25.0, 10.0, 0.0, 10.0));
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
