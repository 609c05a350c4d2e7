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

// Slow, obviously-correct reference implementations and random generators
// shared by the unit and acceptance tests. Nothing here calls the library
// routine it is used to check.

#ifndef PGMCTS_TESTS__ORACLES_HPP_
#define PGMCTS_TESTS__ORACLES_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/map_geometry.hpp"
#include "pgmcts/occupancy.hpp"
#include "pgmcts/planner.hpp"
#include "pgmcts/proposals.hpp"
#include "pgmcts/raster.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace pgmcts::oracle
{

// ---------------------------------------------------------------- generators

class Gen
{
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::mt19937_64 & engine() { return rng_; }

  /// Star-shaped simple polygon around `center`, counterclockwise.
  Polyline star_polygon(const Vec2 & center, double r_min, double r_max, int vertices)
  {
    std::vector<double> angles;
    for (int i = 0; i < vertices; ++i) {
      angles.push_back(uniform(0.0, 2.0 * M_PI));
    }
    std::sort(angles.begin(), angles.end());
    Polyline poly;
    for (double a : angles) {
      poly.push_back(center + uniform(r_min, r_max) * Vec2(std::cos(a), std::sin(a)));
    }
    return poly;
  }

  /// Binary field with roughly `density` of its cells set, at least one.
  GridArray<float> binary_field(int rows, int cols, double density)
  {
    GridArray<float> f = GridArray<float>::Zero(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        f(r, c) = coin(density) ? 1.0F : 0.0F;
      }
    }
    f(integer(0, rows - 1), integer(0, cols - 1)) = 1.0F;
    return f;
  }

  GridArray<float> unit_field(int rows, int cols)
  {
    GridArray<float> f(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        f(r, c) = static_cast<float>(uniform(0.0, 1.0));
      }
    }
    return f;
  }

private:
  std::mt19937_64 rng_;
};

// ------------------------------------------------------------------ geometry

/// Crossing-number test with the boundary counted as inside.
inline bool ray_cast_inside(const Vec2 & p, const Polyline & poly)
{
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & a = poly[i];
    const Vec2 & b = poly[(i + 1) % n];
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    if ((a + t * ab - p).norm() < 1e-12) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = poly[i];
    const Vec2 & b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

/// Minimum total centerline length over every simple successor path.
inline std::optional<double> shortest_path_by_enumeration(const LaneGraph & graph, LaneId start, LaneId goal)
{
  std::optional<double> best;
  std::set<LaneId> on_path;
  std::function<void(LaneId, double)> dfs = [&](LaneId id, double acc) {
    const Lane & lane = graph.at(id);
    const double total = acc + polyline_length(lane.centerline);
    if (id == goal) {
      if (!best || total < *best) {
        best = total;
      }
      return;
    }
    on_path.insert(id);
    for (LaneId next : lane.successors) {
      if (!on_path.count(next)) {
        dfs(next, total);
      }
    }
    on_path.erase(id);
  };
  dfs(start, 0.0);
  return best;
}

/// Separating-axis test written out independently over all four edge normals,
/// strict overlap on every axis; touching counts as contact.
inline bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  auto corners = [](const OrientedBox & box) {
    const double c = std::cos(box.center.theta);
    const double s = std::sin(box.center.theta);
    const double hl = box.dims.length / 2.0;
    const double hw = box.dims.width / 2.0;
    std::vector<Vec2> out;
    for (double i : {-1.0, 1.0}) {
      for (double j : {-1.0, 1.0}) {
        out.emplace_back(box.center.x + i * hl * c - j * hw * s, box.center.y + i * hl * s + j * hw * c);
      }
    }
    return out;
  };
  const auto ca = corners(a);
  const auto cb = corners(b);
  for (double theta : {a.center.theta, a.center.theta + M_PI / 2, b.center.theta, b.center.theta + M_PI / 2}) {
    const Vec2 axis(std::cos(theta), std::sin(theta));
    double a_lo = 1e300;
    double a_hi = -1e300;
    double b_lo = 1e300;
    double b_hi = -1e300;
    for (const Vec2 & p : ca) {
      a_lo = std::min(a_lo, p.dot(axis));
      a_hi = std::max(a_hi, p.dot(axis));
    }
    for (const Vec2 & p : cb) {
      b_lo = std::min(b_lo, p.dot(axis));
      b_hi = std::max(b_hi, p.dot(axis));
    }
    if (a_hi < b_lo || b_hi < a_lo) {
      return false;
    }
  }
  return true;
}

// -------------------------------------------------------------------- raster

/// Grid-frame (forward, left) coordinates of a world point, meters.
inline Vec2 to_grid_frame(const Vec2 & p, const GridSpec & spec)
{
  const double dx = p.x() - spec.origin.x;
  const double dy = p.y() - spec.origin.y;
  const double c = std::cos(spec.origin.theta);
  const double s = std::sin(spec.origin.theta);
  return {c * dx + s * dy, -s * dx + c * dy};
}

/// All cells, including off-grid ones, whose centers lie in the box.
inline std::vector<Cell> footprint_cells(const Pose2 & center, const BoxDims & dims, const GridSpec & spec)
{
  const Vec2 g = to_grid_frame(center.position(), spec);
  const double phi = center.theta - spec.origin.theta;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double reach = std::hypot(dims.length, dims.width) / 2.0 / spec.resolution + 2.0;
  const int r_mid = static_cast<int>(std::floor(g.x() / spec.resolution)) + spec.center_row();
  const int c_mid = static_cast<int>(std::floor(g.y() / spec.resolution)) + spec.center_col();
  std::vector<Cell> out;
  const int span = static_cast<int>(std::ceil(reach));
  for (int r = r_mid - span; r <= r_mid + span; ++r) {
    for (int col = c_mid - span; col <= c_mid + span; ++col) {
      const double u = (r - spec.center_row() + 0.5) * spec.resolution - g.x();
      const double w = (col - spec.center_col() + 0.5) * spec.resolution - g.y();
      const double along = u * c + w * s;
      const double across = -u * s + w * c;
      if (std::abs(along) <= dims.length / 2.0 + 1e-12 && std::abs(across) <= dims.width / 2.0 + 1e-12) {
        out.push_back({r, col});
      }
    }
  }
  return out;
}

/// O(N^2) nearest-set-cell distance in cell units.
/// Squared cell distance to the nearest nonzero cell, by enumeration. Exact integers.
inline GridArray<double> brute_force_sq_edt(const GridArray<float> & source)
{
  std::vector<std::pair<int, int>> set;
  for (int r = 0; r < source.rows(); ++r) {
    for (int c = 0; c < source.cols(); ++c) {
      if (source(r, c) != 0.0F) {
        set.emplace_back(r, c);
      }
    }
  }
  GridArray<double> out(source.rows(), source.cols());
  for (int r = 0; r < source.rows(); ++r) {
    for (int c = 0; c < source.cols(); ++c) {
      long best = std::numeric_limits<long>::max();
      for (const auto & [sr, sc] : set) {
        best = std::min(best, static_cast<long>(r - sr) * (r - sr) + static_cast<long>(c - sc) * (c - sc));
      }
      out(r, c) = set.empty() ? std::numeric_limits<double>::infinity() : static_cast<double>(best);
    }
  }
  return out;
}

inline GridArray<double> brute_force_edt(const GridArray<float> & source)
{
  return brute_force_sq_edt(source).sqrt();
}

// ------------------------------------------------------------------- planner

inline double ucb_score(double q, int v, int parent_v, double c)
{
  return q / v + c * std::sqrt(std::log(static_cast<double>(parent_v)) / v);
}

/// Per-timestep, per-cell evaluation of the max-over-time kernel cost.
inline double naive_cost(
  const Trajectory & traj, const OccupancySequence & occ, const DeviationMaps & dev, const VehicleParams & params,
  double alpha, double beta, double penalty)
{
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < occ.size(); ++t) {
    const VehicleState & s = traj[t + 1];
    const Pose2 center{s.x + std::cos(s.theta) * params.wheelbase / 2.0, s.y + std::sin(s.theta) * params.wheelbase / 2.0,
      s.theta};
    const std::vector<Cell> cells = footprint_cells(center, params.dims(), occ.spec);
    bool inside = true;
    double sum = 0.0;
    for (const Cell & c : cells) {
      if (!occ.spec.contains(c.row, c.col)) {
        inside = false;
        break;
      }
      sum += alpha * occ.grids[t].values(c.row, c.col) + beta * dev.maps[t].values(c.row, c.col);
    }
    if (!inside) {
      sum = penalty * static_cast<double>(cells.size());
    }
    worst = std::max(worst, sum);
  }
  return occ.size() == 0 ? 0.0 : worst;
}

/// Occupancy-mass centroid (row, col) of one grid.
inline Vec2 centroid(const Grid & g)
{
  double m = 0.0;
  double r = 0.0;
  double c = 0.0;
  for (int i = 0; i < g.values.rows(); ++i) {
    for (int j = 0; j < g.values.cols(); ++j) {
      const double v = g.values(i, j);
      m += v;
      r += v * i;
      c += v * j;
    }
  }
  return m > 0.0 ? Vec2(r / m, c / m) : Vec2(-1.0, -1.0);
}

}  // namespace pgmcts::oracle

#endif  // PGMCTS_TESTS__ORACLES_HPP_
