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

#include "pgmcts/error.hpp"
#include "pgmcts/map_geometry.hpp"
#include "support/errors.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

namespace pgmcts
{
namespace
{

using testing::kind_of;

Lane straight(LaneId id, Vec2 a, Vec2 b, std::vector<LaneId> succ = {})
{
  Lane l;
  l.id = id;
  l.centerline = {a, b};
  l.successors = std::move(succ);
  return l;
}

TEST(Route, TwoLaneChain)
{
  LaneGraph g({straight(1, {0, 0}, {10, 0}, {2}), straight(2, {10, 0}, {25, 0})});
  const Route r = extract_route(g, 1, 2);
  EXPECT_EQ(r.lane_ids, (std::vector<LaneId>{1, 2}));
  EXPECT_NEAR(r.total_length, 25.0, 1e-9);
}

TEST(Route, StartEqualsGoalResamplesCenterline)
{
  LaneGraph g({straight(1, {0, 0}, {10, 0})});
  const Route r = extract_route(g, 1, 1);
  EXPECT_EQ(r.lane_ids, (std::vector<LaneId>{1}));
  ASSERT_EQ(r.waypoints.size(), 11u);
  for (std::size_t i = 0; i < r.waypoints.size(); ++i) {
    EXPECT_NEAR(r.waypoints[i].x, static_cast<double>(i), 1e-9);
    EXPECT_NEAR(r.waypoints[i].theta, 0.0, 1e-12);
  }
}

TEST(Route, DiamondPicksShorterBranch)
{
  // A -> {B (10 m), C (12 m)} -> D
  Lane c;
  c.id = 3;
  c.centerline = {{10, 0}, {15, -std::sqrt(11.0)}, {20, 0}};
  c.successors = {4};
  LaneGraph g({straight(1, {0, 0}, {10, 0}, {3, 2}), straight(2, {10, 0}, {20, 0}, {4}), c,
    straight(4, {20, 0}, {30, 0})});
  ASSERT_NEAR(polyline_length(c.centerline), 12.0, 1e-9);
  const Route r = extract_route(g, 1, 4);
  EXPECT_EQ(r.lane_ids, (std::vector<LaneId>{1, 2, 4}));
  EXPECT_NEAR(r.total_length, *oracle::shortest_path_by_enumeration(g, 1, 4), 1e-6);
}

TEST(Route, EqualLengthBranchesTieToLowerId)
{
  LaneGraph g({straight(1, {0, 0}, {10, 0}, {7, 3}), straight(7, {10, 0}, {20, 0}, {9}),
    straight(3, {10, 0}, {20, 0}, {9}), straight(9, {20, 0}, {30, 0})});
  EXPECT_EQ(extract_route(g, 1, 9).lane_ids, (std::vector<LaneId>{1, 3, 9}));
}

TEST(Route, Errors)
{
  LaneGraph g({straight(1, {0, 0}, {10, 0}), straight(2, {10, 0}, {20, 0})});
  EXPECT_EQ(kind_of([&] { extract_route(g, 1, 2); }), ErrorKind::NoRoute);
  EXPECT_EQ(kind_of([&] { extract_route(g, 1, 5); }), ErrorKind::UnknownLane);
  EXPECT_EQ(kind_of([&] { extract_route(g, 5, 1); }), ErrorKind::UnknownLane);
}

TEST(LaneGraph, RejectsBrokenLanes)
{
  EXPECT_EQ(kind_of([] { LaneGraph({straight(1, {0, 0}, {1, 0}, {4})}); }), ErrorKind::FormatError);
  Lane one_point;
  one_point.id = 1;
  one_point.centerline = {{0, 0}};
  EXPECT_EQ(kind_of([&] { LaneGraph({one_point}); }), ErrorKind::FormatError);
  Lane repeated = straight(1, {0, 0}, {0, 0});
  EXPECT_EQ(kind_of([&] { LaneGraph({repeated}); }), ErrorKind::FormatError);
}

TEST(Route, ShortestMatchesEnumerationOnRandomGraphs)
{
  oracle::Gen gen(11);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(2, 10);
    std::vector<Lane> lanes;
    for (int i = 0; i < n; ++i) {
      Lane l;
      l.id = i + 1;
      const Vec2 a(gen.uniform(-50, 50), gen.uniform(-50, 50));
      l.centerline = {a, a + Vec2(gen.uniform(1, 30), gen.uniform(-5, 5))};
      for (int j = 0; j < n; ++j) {
        if (j != i && gen.coin(0.3)) {
          l.successors.push_back(j + 1);
        }
      }
      lanes.push_back(l);
    }
    const LaneGraph g(lanes);
    const LaneId start = gen.integer(1, n);
    const LaneId goal = gen.integer(1, n);
    const auto best = oracle::shortest_path_by_enumeration(g, start, goal);
    if (!best) {
      EXPECT_EQ(kind_of([&] { extract_route(g, start, goal); }), ErrorKind::NoRoute);
      continue;
    }
    const Route r = extract_route(g, start, goal);
    double len = 0.0;
    for (LaneId id : r.lane_ids) {
      len += polyline_length(g.at(id).centerline);
    }
    EXPECT_NEAR(len, *best, 1e-9) << "trial " << trial;
    for (std::size_t i = 1; i < r.lane_ids.size(); ++i) {
      const auto & succ = g.at(r.lane_ids[i - 1]).successors;
      EXPECT_NE(std::find(succ.begin(), succ.end(), r.lane_ids[i]), succ.end());
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Route, TotalLengthMatchesWaypointSegments)
{
  Lane l;
  l.id = 1;
  for (int i = 0; i <= 40; ++i) {
    l.centerline.emplace_back(i * 1.3, 4.0 * std::sin(i * 0.2));
  }
  const Route r = extract_route(LaneGraph({l}), 1, 1);
  double sum = 0.0;
  for (std::size_t i = 1; i < r.waypoints.size(); ++i) {
    sum += (r.waypoints[i].position() - r.waypoints[i - 1].position()).norm();
  }
  EXPECT_NEAR(r.total_length, sum, 1e-6);
}

TEST(Projection, Examples)
{
  const Route r = extract_route(LaneGraph({straight(1, {0, 0}, {10, 0})}), 1, 1);
  auto p = project_to_route({0, 0}, r);
  EXPECT_DOUBLE_EQ(p.arc_length, 0.0);
  EXPECT_DOUBLE_EQ(p.lateral_offset, 0.0);
  p = project_to_route({5, 2}, r);
  EXPECT_NEAR(p.arc_length, 5.0, 1e-12);
  EXPECT_NEAR(p.lateral_offset, 2.0, 1e-12);
  p = project_to_route({14, -1}, r);
  EXPECT_NEAR(p.arc_length, 10.0, 1e-12);
  EXPECT_NEAR(p.lateral_offset, -1.0, 1e-12);
}

TEST(Projection, MonotoneAlongOwnWaypoints)
{
  oracle::Gen gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    Lane l;
    l.id = 1;
    double x = 0.0;
    double y = 0.0;
    double h = 0.0;
    for (int i = 0; i < 20; ++i) {
      l.centerline.emplace_back(x, y);
      h += gen.uniform(-0.3, 0.3);
      const double step = gen.uniform(1.0, 6.0);
      x += step * std::cos(h);
      y += step * std::sin(h);
    }
    const Route r = extract_route(LaneGraph({l}), 1, 1);
    double prev = -1.0;
    for (const Pose2 & w : r.waypoints) {
      const double s = project_to_route(w.position(), r).arc_length;
      EXPECT_GE(s, prev - 1e-9);
      prev = s;
    }
  }
}

TEST(Drivable, Examples)
{
  const DrivableArea area = make_drivable_area({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  EXPECT_TRUE(point_in_drivable({0.5, 0.5}, area));
  EXPECT_FALSE(point_in_drivable({1000, 1000}, area));
  EXPECT_TRUE(point_in_drivable({1.0, 0.3}, area));
  EXPECT_TRUE(point_in_drivable({0.0, 0.0}, area));
}

TEST(Drivable, ClockwiseInputIsNormalized)
{
  const DrivableArea area = make_drivable_area({{{0, 0}, {0, 1}, {1, 1}, {1, 0}}});
  EXPECT_GT(signed_area(area.polygons[0]), 0.0);
}

TEST(Drivable, SelfIntersectingPolygonRejected)
{
  EXPECT_EQ(kind_of([] { make_drivable_area({{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}); }), ErrorKind::FormatError);
}

TEST(Drivable, AgreesWithRayCasting)
{
  oracle::Gen gen(3);
  for (int set = 0; set < 10; ++set) {
    std::vector<Polyline> polys;
    const int n = gen.integer(1, 3);
    for (int i = 0; i < n; ++i) {
      polys.push_back(gen.star_polygon({gen.uniform(-20, 20), gen.uniform(-20, 20)}, 2.0, 12.0, gen.integer(3, 12)));
    }
    const DrivableArea area = make_drivable_area(polys);
    for (int k = 0; k < 1000; ++k) {
      const Vec2 p(gen.uniform(-35, 35), gen.uniform(-35, 35));
      bool expected = false;
      for (const Polyline & poly : polys) {
        expected = expected || oracle::ray_cast_inside(p, poly);
      }
      ASSERT_EQ(point_in_drivable(p, area), expected) << "set " << set << " point " << p.transpose();
    }
  }
}

}  // namespace
}  // namespace pgmcts
