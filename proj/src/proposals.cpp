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

#include "pgmcts/proposals.hpp"

#include "pgmcts/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace pgmcts
{

std::vector<Control> reference_controls(const Trajectory & traj)
{
  std::vector<Control> out;
  if (traj.size() < 2) {
    return out;
  }
  out.reserve(traj.size() - 1);
  for (std::size_t t = 1; t < traj.size(); ++t) {
    out.push_back(applied_control(traj[t]));
  }
  return out;
}

double pure_pursuit_steer(const VehicleState & state, const Route & route, double wheelbase, const ProposalParams & p)
{
  const RouteProjection proj = project_to_route(state.position(), route);
  const double lookahead = std::max(p.lookahead_min, p.lookahead_gain * state.v);
  const Pose2 target = route_pose_at(route, proj.arc_length + lookahead);
  const Vec2 d = target.position() - state.position();
  const double dist = d.norm();
  if (dist < 1e-9) {
    return 0.0;
  }
  const double alpha = wrap_angle(std::atan2(d.y(), d.x()) - state.theta);
  return std::atan(2.0 * wheelbase * std::sin(alpha) / dist);
}

Trajectory track_route(
  const VehicleState & state, const Route & route, const VehicleParams & params, double accel,
  double target_speed, const ProposalParams & p)
{
  Trajectory traj;
  traj.dt = p.dt;
  traj.states.reserve(static_cast<std::size_t>(p.steps) + 1);
  traj.states.push_back(state);
  Control prev = applied_control(state);
  for (int t = 0; t < p.steps; ++t) {
    const VehicleState & s = traj.states.back();
    Control raw;
    if (accel > 0.0) {
      raw.accel = std::clamp((target_speed - s.v) / p.dt, 0.0, accel);
    } else if (accel < 0.0) {
      raw.accel = std::max(accel, -s.v / p.dt);
    }
    raw.steer = pure_pursuit_steer(s, route, params.wheelbase, p);
    const Control u = clip_control(raw, prev, params, p.dt);
    VehicleState next = bicycle_step(s, u, p.dt, params.wheelbase);
    // v - (v / dt) * dt can leave a few ulps behind; a braking profile stops.
    if (accel < 0.0 && next.v < 1e-9) {
      next.v = 0.0;
    }
    traj.states.push_back(next);
    prev = u;
  }
  return traj;
}

namespace
{

std::optional<LaneId> nearest_route_lane(const LaneGraph & graph, const Route & route, const Vec2 & point)
{
  std::optional<LaneId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (LaneId id : route.lane_ids) {
    const Lane * lane = graph.find(id);
    if (lane == nullptr) {
      continue;
    }
    for (std::size_t i = 0; i + 1 < lane->centerline.size(); ++i) {
      const double d = point_segment_distance(point, lane->centerline[i], lane->centerline[i + 1]);
      if (d < best_d) {
        best_d = d;
        best = id;
      }
    }
  }
  return best;
}

// Speed profile of the k-th extra mode beyond the three basic ones.
double extra_accel(int k)
{
  const int level = k / 2 + 1;
  return k % 2 == 0 ? 0.5 * level + 1.0 : -0.75 * level - 1.5;
}

}  // namespace

ProposalSet sample_centerline_proposals(
  const VehicleState & state, const Route & route, const VehicleParams & params, int count,
  const ProposalParams & p, const LaneGraph * graph)
{
  if (route.waypoints.size() < 2) {
    throw Error(ErrorKind::EmptyRoute, "cannot sample proposals along an empty route");
  }
  if (count < 1) {
    throw Error(ErrorKind::FormatError, "proposal count must be at least 1");
  }
  const double limit = route.speed_limit.value_or(p.fallback_speed_limit);
  ProposalSet set;
  auto add = [&](Trajectory traj, std::string label) {
    if (static_cast<int>(set.size()) < count) {
      set.modes.push_back(std::move(traj));
      set.labels.push_back(std::move(label));
    }
  };
  add(track_route(state, route, params, p.accel_mode, limit, p), "accelerate");
  add(track_route(state, route, params, 0.0, limit, p), "hold");
  add(track_route(state, route, params, p.decel_mode, limit, p), "decelerate");

  if (count > 3 && graph != nullptr) {
    if (const auto current = nearest_route_lane(*graph, route, state.position())) {
      const Lane & lane = graph->at(*current);
      if (lane.left) {
        add(track_route(state, follow_lane(*graph, *lane.left), params, 0.0, limit, p), "hold-left");
      }
      if (lane.right) {
        add(track_route(state, follow_lane(*graph, *lane.right), params, 0.0, limit, p), "hold-right");
      }
    }
  }
  for (int k = 0; static_cast<int>(set.size()) < count; ++k) {
    const double a = std::clamp(extra_accel(k), params.accel_min, params.accel_max);
    std::ostringstream label;
    label << "profile" << a;
    add(track_route(state, route, params, a, limit, p), label.str());
  }
  set.scores.assign(set.size(), 1.0 / static_cast<double>(set.size()));
  return set;
}

ProposalSet reconstruct_proposals(
  const std::vector<std::vector<Pose2>> & poses, const std::vector<std::vector<double>> & speeds,
  const std::vector<double> & scores, const VehicleState & state, const VehicleParams & params,
  const ProposalParams & p)
{
  if (poses.empty() || poses.size() != speeds.size() || poses.size() != scores.size()) {
    throw Error(ErrorKind::FormatError, "proposal modes, speeds and scores must be non-empty and aligned");
  }
  ProposalSet set;
  for (std::size_t m = 0; m < poses.size(); ++m) {
    const auto & pm = poses[m];
    const auto & vm = speeds[m];
    if (static_cast<int>(pm.size()) != p.steps + 1 || vm.size() != pm.size()) {
      throw Error(
        ErrorKind::FormatError, "mode " + std::to_string(m) + " has " + std::to_string(pm.size()) +
                                  " states, expected " + std::to_string(p.steps + 1));
    }
    const double dpos = (pm[0].position() - state.position()).norm();
    const double dhead = std::abs(wrap_angle(pm[0].theta - state.theta));
    if (dpos > p.start_position_tol || dhead > p.start_heading_tol) {
      std::ostringstream msg;
      msg << "mode " << m << " starts " << dpos << " m and " << dhead << " rad from the ego state";
      throw Error(ErrorKind::StartMismatch, msg.str());
    }
    Trajectory traj;
    traj.dt = p.dt;
    traj.states.push_back(state);
    Control prev = applied_control(state);
    double worst = 0.0;
    std::size_t worst_t = 0;
    for (std::size_t t = 0; t + 1 < pm.size(); ++t) {
      const VehicleState & s = traj.states.back();
      Control raw;
      raw.accel = (vm[t + 1] - s.v) / p.dt;
      raw.steer = prev.steer;
      if (s.v * p.dt > 1e-9) {
        const double dtheta = wrap_angle(pm[t + 1].theta - s.theta);
        raw.steer = std::atan(params.wheelbase * dtheta / (s.v * p.dt));
      }
      const Control u = clip_control(raw, prev, params, p.dt);
      traj.states.push_back(bicycle_step(s, u, p.dt, params.wheelbase));
      prev = u;
      const double dev = (traj.states.back().position() - pm[t + 1].position()).norm();
      if (dev > worst) {
        worst = dev;
        worst_t = t + 1;
      }
    }
    if (worst > p.feasibility_tol) {
      std::ostringstream msg;
      msg << "mode " << m << " deviates " << worst << " m from its bicycle reconstruction at step " << worst_t;
      throw Error(ErrorKind::Infeasible, msg.str());
    }
    set.modes.push_back(std::move(traj));
    set.labels.push_back("mode" + std::to_string(m));
  }
  double total = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorKind::FormatError, "proposal scores must be finite and non-negative");
    }
    total += s;
  }
  if (total <= 0.0) {
    set.scores.assign(scores.size(), 1.0 / static_cast<double>(scores.size()));
  } else {
    for (double s : scores) {
      set.scores.push_back(s / total);
    }
  }
  return set;
}

ProposalSet load_proposals(
  const std::string & path, const VehicleState & state, const VehicleParams & params, const ProposalParams & p)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::FormatError, "cannot open proposal file: " + path);
  }
  std::vector<std::vector<Pose2>> poses;
  std::vector<std::vector<double>> speeds;
  std::vector<double> scores;
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.at("version").get<int>() != 1) {
      throw Error(ErrorKind::FormatError, "unsupported proposal file version in " + path);
    }
    if (std::abs(doc.at("dt").get<double>() - p.dt) > 1e-9) {
      throw Error(ErrorKind::FormatError, "proposal dt must be " + std::to_string(p.dt));
    }
    for (const auto & mode : doc.at("modes")) {
      scores.push_back(mode.at("score").get<double>());
      std::vector<Pose2> pm;
      std::vector<double> vm;
      for (const auto & row : mode.at("states")) {
        if (!row.is_array() || row.size() != 4) {
          throw Error(ErrorKind::FormatError, "proposal states are [x, y, theta, v] rows");
        }
        pm.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        vm.push_back(row[3].get<double>());
      }
      poses.push_back(std::move(pm));
      speeds.push_back(std::move(vm));
    }
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorKind::FormatError, path + ": " + e.what());
  }
  return reconstruct_proposals(poses, speeds, scores, state, params, p);
}

void save_proposals(const std::string & path, const ProposalSet & set)
{
  nlohmann::json doc;
  doc["version"] = 1;
  doc["dt"] = set.modes.empty() ? kTickSeconds : set.modes.front().dt;
  doc["modes"] = nlohmann::json::array();
  for (std::size_t m = 0; m < set.size(); ++m) {
    nlohmann::json rows = nlohmann::json::array();
    for (const VehicleState & s : set.modes[m].states) {
      rows.push_back({s.x, s.y, s.theta, s.v});
    }
    doc["modes"].push_back({{"score", set.scores[m]}, {"states", rows}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::FormatError, "cannot open for writing: " + path);
  }
  out << doc.dump(1) << "\n";
}

DeviationMaps build_deviation_maps(
  const Trajectory & mode, const VehicleParams & params, const GridSpec & spec, double d_max, int steps)
{
  DeviationMaps out;
  build_deviation_maps(mode, params, spec, d_max, steps, out);
  return out;
}

void build_deviation_maps(
  const Trajectory & mode, const VehicleParams & params, const GridSpec & spec, double d_max, int steps,
  DeviationMaps & out)
{
  if (static_cast<int>(mode.size()) < steps + 1) {
    throw Error(
      ErrorKind::LengthMismatch, "mode has " + std::to_string(mode.size()) + " states, expected " +
                                   std::to_string(steps + 1));
  }
  if (!(d_max > 0.0)) {
    throw Error(ErrorKind::FormatError, "d_max must be positive");
  }
  out.d_max = d_max;
  out.maps.resize(static_cast<std::size_t>(steps));
  // Cells farther than d_max from the footprint bounding box saturate, so the
  // transform only needs a margin of d_max around it.
  const int margin = static_cast<int>(std::ceil(d_max / spec.resolution)) + 1;
  const double inf = std::numeric_limits<double>::infinity();
  GridArray<double> window;
  Footprint fp;
  for (int i = 0; i < steps; ++i) {
    Grid & g = out.maps[static_cast<std::size_t>(i)];
    if (g.values.rows() != spec.rows || g.values.cols() != spec.cols) {
      g = Grid(spec, GridSemantics::Distance, 1.0F);
      g.dirty = CellBox{};
    } else {
      g.spec = spec;
      g.semantics = GridSemantics::Distance;
      g.refill(1.0F);
    }
    rasterize_footprint_spans(body_center(mode[static_cast<std::size_t>(i) + 1], params), params.dims(), spec, fp);
    fp = fp.clipped(spec);
    if (fp.empty()) {
      throw Error(
        ErrorKind::FootprintOffGrid, "proposal footprint leaves the grid at step " + std::to_string(i + 1));
    }
    int c_lo = fp.spans.front().col_begin;
    int c_hi = fp.spans.front().col_end;
    for (const RowSpan & s : fp.spans) {
      c_lo = std::min(c_lo, s.col_begin);
      c_hi = std::max(c_hi, s.col_end);
    }
    const int r0 = std::max(0, fp.spans.front().row - margin);
    const int r1 = std::min(spec.rows, fp.spans.back().row + 1 + margin);
    const int c0 = std::max(0, c_lo - margin);
    const int c1 = std::min(spec.cols, c_hi + margin);
    window.setConstant(r1 - r0, c1 - c0, inf);
    for (const RowSpan & s : fp.spans) {
      window.row(s.row - r0).segment(s.col_begin - c0, s.width()).setZero();
    }
    detail::squared_edt(window);
    const double scale = spec.resolution / d_max;
    g.values.block(r0, c0, r1 - r0, c1 - c0) = (window.sqrt() * scale).min(1.0).cast<float>();
    g.dirty = CellBox{r0, c0, r1, c1};
  }
}

}  // namespace pgmcts
