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

#ifndef PGMCTS__DYNAMICS_HPP_
#define PGMCTS__DYNAMICS_HPP_

#include "pgmcts/geometry.hpp"

#include <span>
#include <vector>

namespace pgmcts
{

inline constexpr double kTickSeconds = 0.1;
inline constexpr int kHistoryFrames = 10;  // 1 s at 10 Hz
inline constexpr int kFutureSteps = 30;    // 3 s at 10 Hz

/// Rear-axle kinematic state. `accel` and `steer` hold the control applied on
/// the step that produced this state.
struct VehicleState
{
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double accel = 0.0;
  double steer = 0.0;

  Vec2 position() const { return {x, y}; }
  Pose2 pose() const { return {x, y, theta}; }

  bool operator==(const VehicleState &) const = default;
};

struct Control
{
  double accel = 0.0;
  double steer = 0.0;

  bool operator==(const Control &) const = default;
};

inline Control applied_control(const VehicleState & s) { return {s.accel, s.steer}; }

struct VehicleParams
{
  double wheelbase = 3.0;
  double length = 4.8;
  double width = 2.0;
  double accel_min = -4.0;
  double accel_max = 3.0;
  double steer_max = 0.55;
  double jerk_max = 6.0;

  BoxDims dims() const { return {length, width}; }
};

/// Throws FormatError when limits are inconsistent.
void validate(const VehicleParams & params);

/// Timestamped states at a fixed tick; index i is at time i * dt.
struct Trajectory
{
  double dt = kTickSeconds;
  std::vector<VehicleState> states;

  std::size_t size() const { return states.size(); }
  const VehicleState & operator[](std::size_t i) const { return states[i]; }
  VehicleState & operator[](std::size_t i) { return states[i]; }
  double duration() const { return states.empty() ? 0.0 : dt * static_cast<double>(states.size() - 1); }

  bool operator==(const Trajectory &) const = default;
};

/// Box-center pose of the vehicle body; the rectangle is centered halfway
/// along the wheelbase.
inline Pose2 body_center(const VehicleState & s, const VehicleParams & params)
{
  const Vec2 c = s.position() + heading_vector(s.theta) * (params.wheelbase / 2.0);
  return {c.x(), c.y(), s.theta};
}

inline OrientedBox body_box(const VehicleState & s, const VehicleParams & params)
{
  return {body_center(s, params), params.dims()};
}

/// Explicit-Euler rear-axle bicycle update. Speed is clamped at zero.
VehicleState bicycle_step(const VehicleState & state, const Control & control, double dt, double wheelbase);

/// Actuation and jerk limits; the tighter accel bound wins.
Control clip_control(const Control & raw, const Control & prev, const VehicleParams & params, double dt);

/// len(controls)+1 states; each control is clipped against its predecessor
/// (the first against the state's applied control) before propagation.
Trajectory rollout_controls(
  const VehicleState & state, std::span<const Control> controls, const VehicleParams & params,
  double dt = kTickSeconds);

}  // namespace pgmcts

#endif  // PGMCTS__DYNAMICS_HPP_
