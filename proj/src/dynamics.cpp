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

#include "pgmcts/dynamics.hpp"

#include "pgmcts/error.hpp"

#include <algorithm>
#include <cmath>

namespace pgmcts
{

void validate(const VehicleParams & p)
{
  const bool ok = p.wheelbase > 0.0 && p.length > 0.0 && p.width > 0.0 && p.accel_min < 0.0 &&
                  p.accel_max > 0.0 && p.steer_max > 0.0 && p.jerk_max > 0.0 &&
                  p.wheelbase < p.length;
  if (!ok) {
    throw Error(ErrorKind::FormatError, "inconsistent vehicle parameters");
  }
}

VehicleState bicycle_step(const VehicleState & s, const Control & u, double dt, double wheelbase)
{
  VehicleState next;
  next.x = s.x + s.v * std::cos(s.theta) * dt;
  next.y = s.y + s.v * std::sin(s.theta) * dt;
  next.theta = wrap_angle(s.theta + s.v * std::tan(u.steer) / wheelbase * dt);
  next.v = std::max(0.0, s.v + u.accel * dt);
  next.accel = u.accel;
  next.steer = u.steer;
  return next;
}

Control clip_control(const Control & raw, const Control & prev, const VehicleParams & p, double dt)
{
  const double jerk_step = p.jerk_max * dt;
  const double lo = std::max(p.accel_min, prev.accel - jerk_step);
  const double hi = std::min(p.accel_max, prev.accel + jerk_step);
  Control out;
  // When the previous accel is already outside actuation limits the jerk
  // window can miss them entirely; actuation limits take precedence.
  out.accel = lo <= hi ? std::clamp(raw.accel, lo, hi) : std::clamp(raw.accel, p.accel_min, p.accel_max);
  out.steer = std::clamp(raw.steer, -p.steer_max, p.steer_max);
  return out;
}

Trajectory rollout_controls(
  const VehicleState & state, std::span<const Control> controls, const VehicleParams & params,
  double dt)
{
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(state);
  Control prev = applied_control(state);
  for (const Control & raw : controls) {
    const Control u = clip_control(raw, prev, params, dt);
    traj.states.push_back(bicycle_step(traj.states.back(), u, dt, params.wheelbase));
    prev = u;
  }
  return traj;
}

}  // namespace pgmcts
