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
#include "pgmcts/geometry.hpp"
#include "support/errors.hpp"
#include "support/oracles.hpp"

#include <Eigen/QR>
#include <gtest/gtest.h>

namespace pgmcts
{
namespace
{

// Least-squares circle fit (algebraic), returns the radius.
double fit_radius(const std::vector<Vec2> & pts)
{
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    a(k, 0) = pts[i].x();
    a(k, 1) = pts[i].y();
    a(k, 2) = 1.0;
    b(k) = -(pts[i].squaredNorm());
  }
  const Eigen::Vector3d p = a.colPivHouseholderQr().solve(b);
  const double cx = -p(0) / 2.0;
  const double cy = -p(1) / 2.0;
  return std::sqrt(cx * cx + cy * cy - p(2));
}

TEST(Bicycle, StraightLineStep)
{
  VehicleState s;
  s.v = 10.0;
  const VehicleState n = bicycle_step(s, {0.0, 0.0}, 0.1, 3.0);
  EXPECT_EQ(n.x, 1.0);
  EXPECT_EQ(n.y, 0.0);
  EXPECT_EQ(n.theta, 0.0);
  EXPECT_EQ(n.v, 10.0);
}

TEST(Bicycle, StartFromRest)
{
  VehicleState s;
  const VehicleState n = bicycle_step(s, {2.0, 0.0}, 0.1, 3.0);
  EXPECT_DOUBLE_EQ(n.v, 0.2);
  EXPECT_EQ(n.x, 0.0);
  EXPECT_EQ(n.y, 0.0);
  EXPECT_EQ(n.accel, 2.0);
}

TEST(Bicycle, NoReverse)
{
  VehicleState s;
  s.v = 0.1;
  EXPECT_EQ(bicycle_step(s, {-4.0, 0.0}, 0.1, 3.0).v, 0.0);
}

TEST(Bicycle, CircleRadiusMatchesClosedForm)
{
  const double L = 3.0;
  const double delta = 0.1;
  const double expected = L / std::tan(delta);
  EXPECT_NEAR(expected, 29.90, 0.01);
  VehicleState s;
  s.v = 5.0;
  std::vector<Vec2> pts;
  const int steps = static_cast<int>(2.0 * M_PI * expected / (s.v * 0.01));
  for (int i = 0; i < steps; ++i) {
    s = bicycle_step(s, {0.0, delta}, 0.01, L);
    pts.push_back(s.position());
  }
  EXPECT_NEAR(fit_radius(pts), expected, 0.01 * expected);
}

TEST(Bicycle, HeadingStaysWrapped)
{
  VehicleState s;
  s.v = 10.0;
  for (int i = 0; i < 2000; ++i) {
    s = bicycle_step(s, {0.0, 0.5}, 0.1, 3.0);
    ASSERT_GT(s.theta, -M_PI);
    ASSERT_LE(s.theta, M_PI);
  }
}

TEST(Bicycle, WrapAngleIsHalfOpen)
{
  EXPECT_DOUBLE_EQ(wrap_angle(M_PI), M_PI);
  EXPECT_DOUBLE_EQ(wrap_angle(-M_PI), M_PI);
  EXPECT_NEAR(wrap_angle(3.0 * M_PI + 0.25), -M_PI + 0.25, 1e-12);
}

TEST(Bicycle, DeterministicAndPure)
{
  oracle::Gen gen(1);
  for (int i = 0; i < 100; ++i) {
    VehicleState s{gen.uniform(-5, 5), gen.uniform(-5, 5), gen.uniform(-3, 3), gen.uniform(0, 20), 0.0, 0.0};
    const Control u{gen.uniform(-4, 3), gen.uniform(-0.5, 0.5)};
    EXPECT_EQ(bicycle_step(s, u, 0.1, 3.0), bicycle_step(s, u, 0.1, 3.0));
  }
}

TEST(Clip, Examples)
{
  VehicleParams p;
  EXPECT_EQ(clip_control({1.0, 0.2}, {0.8, 0.0}, p, 0.1), (Control{1.0, 0.2}));

  p.jerk_max = 10.0;
  EXPECT_DOUBLE_EQ(clip_control({5.0, 0.0}, {2.9, 0.0}, p, 0.1).accel, 3.0);
  EXPECT_DOUBLE_EQ(clip_control({3.0, 0.0}, {0.0, 0.0}, p, 0.1).accel, 1.0);
  EXPECT_DOUBLE_EQ(clip_control({0.0, 2.0}, {0.0, 0.0}, p, 0.1).steer, p.steer_max);
  EXPECT_DOUBLE_EQ(clip_control({0.0, -2.0}, {0.0, 0.0}, p, 0.1).steer, -p.steer_max);
}

TEST(Clip, IdempotentOnRandomInputs)
{
  oracle::Gen gen(2);
  const VehicleParams p;
  for (int i = 0; i < 1000; ++i) {
    const Control raw{gen.uniform(-10, 10), gen.uniform(-2, 2)};
    const Control prev{gen.uniform(p.accel_min, p.accel_max), 0.0};
    const Control once = clip_control(raw, prev, p, 0.1);
    EXPECT_EQ(clip_control(once, prev, p, 0.1), once);
    EXPECT_LE(std::abs(once.accel - prev.accel), p.jerk_max * 0.1 + 1e-12);
    EXPECT_GE(once.accel, p.accel_min);
    EXPECT_LE(once.accel, p.accel_max);
  }
}

TEST(Rollout, ShapeAndComposition)
{
  VehicleState s;
  s.v = 4.0;
  const VehicleParams p;
  const std::vector<Control> one{{0.3, 0.05}};
  const Trajectory t1 = rollout_controls(s, one, p);
  ASSERT_EQ(t1.size(), 2u);
  EXPECT_EQ(t1[1], bicycle_step(s, clip_control(one[0], applied_control(s), p, 0.1), 0.1, p.wheelbase));

  const std::vector<Control> thirty(30, Control{0.0, 0.0});
  const Trajectory t30 = rollout_controls(s, thirty, p);
  EXPECT_EQ(t30.size(), 31u);
  EXPECT_NEAR(t30.duration(), 3.0, 1e-12);
}

TEST(Rollout, ZeroControlsFromRestStayPut)
{
  const Trajectory t = rollout_controls(VehicleState{}, std::vector<Control>(10), VehicleParams{});
  for (const VehicleState & s : t.states) {
    EXPECT_EQ(s, VehicleState{});
  }
}

TEST(Rollout, ZeroSteerKeepsHeadingExactly)
{
  oracle::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    VehicleState s;
    s.theta = gen.uniform(-3.0, 3.0);
    s.v = gen.uniform(0, 20);
    std::vector<Control> u;
    for (int i = 0; i < 30; ++i) {
      u.push_back({gen.uniform(-4, 3), 0.0});
    }
    for (const VehicleState & x : rollout_controls(s, u, VehicleParams{}).states) {
      EXPECT_EQ(x.theta, s.theta);
    }
  }
}

TEST(Rollout, JerkBoundOnNoisyControls)
{
  oracle::Gen gen(4);
  const VehicleParams p;
  for (int trial = 0; trial < 1000; ++trial) {
    VehicleState s;
    s.v = gen.uniform(0, 15);
    std::vector<Control> u;
    for (int i = 0; i < 30; ++i) {
      u.push_back({gen.uniform(-6, 6), gen.uniform(-0.8, 0.8)});
    }
    const Trajectory t = rollout_controls(s, u, p);
    for (std::size_t i = 1; i < t.size(); ++i) {
      ASSERT_LE(std::abs(t[i].accel - t[i - 1].accel), p.jerk_max * 0.1 + 1e-12);
    }
  }
}

TEST(Params, Validation)
{
  VehicleParams p;
  EXPECT_NO_THROW(validate(p));
  p.wheelbase = 5.0;
  EXPECT_EQ(testing::kind_of([&] { validate(p); }), ErrorKind::FormatError);
  p = VehicleParams{};
  p.accel_min = 0.5;
  EXPECT_EQ(testing::kind_of([&] { validate(p); }), ErrorKind::FormatError);
}

}  // namespace
}  // namespace pgmcts
