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

#include "pgmcts/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pgmcts
{

void validate(const GridSpec & spec)
{
  if (spec.rows <= 0 || spec.cols <= 0 || !(spec.resolution > 0.0)) {
    throw Error(ErrorKind::FormatError, "grid spec needs positive size and resolution");
  }
}

std::optional<Cell> world_to_cell(const Vec2 & point, const GridSpec & spec)
{
  const Vec2 g = spec.to_grid(point);
  const double r = std::floor(g.x());
  const double c = std::floor(g.y());
  if (r < 0.0 || c < 0.0 || r >= spec.rows || c >= spec.cols) {
    return std::nullopt;
  }
  return Cell{static_cast<int>(r), static_cast<int>(c)};
}

Vec2 cell_to_world(const Cell & cell, const GridSpec & spec)
{
  return spec.to_world(Vec2(cell.row + 0.5, cell.col + 0.5));
}

std::size_t Footprint::cell_count() const
{
  std::size_t n = 0;
  for (const RowSpan & s : spans) {
    n += static_cast<std::size_t>(s.width());
  }
  return n;
}

bool Footprint::fully_inside(const GridSpec & spec) const
{
  return std::all_of(spans.begin(), spans.end(), [&](const RowSpan & s) {
    return s.row >= 0 && s.row < spec.rows && s.col_begin >= 0 && s.col_end <= spec.cols;
  });
}

Footprint Footprint::clipped(const GridSpec & spec) const
{
  Footprint out;
  for (const RowSpan & s : spans) {
    if (s.row < 0 || s.row >= spec.rows) {
      continue;
    }
    const int b = std::max(0, s.col_begin);
    const int e = std::min(spec.cols, s.col_end);
    if (b < e) {
      out.spans.push_back({s.row, b, e});
    }
  }
  return out;
}

void rasterize_footprint_spans(
  const Pose2 & center, const BoxDims & dims, const GridSpec & spec, Footprint & out)
{
  out.spans.clear();
  const Vec2 g = spec.to_grid(center.position());
  const double phi = center.theta - spec.origin.theta;
  const double cs = std::cos(phi);
  const double sn = std::sin(phi);
  const double half_len = dims.length / 2.0 / spec.resolution;
  const double half_wid = dims.width / 2.0 / spec.resolution;

  // Keeps interval endpoints finite for near-axis-aligned boxes.
  constexpr double kFar = 1e7;
  const double extent_row = half_len * std::abs(cs) + half_wid * std::abs(sn);
  const int row_lo = static_cast<int>(std::ceil(g.x() - extent_row - 0.5));
  const int row_hi = static_cast<int>(std::floor(g.x() + extent_row - 0.5));
  for (int r = row_lo; r <= row_hi; ++r) {
    const double du = r + 0.5 - g.x();
    double lo = -kFar;
    double hi = kFar;
    // |du*cs + dw*sn| <= half_len
    if (sn != 0.0) {
      double a = (-half_len - du * cs) / sn;
      double b = (half_len - du * cs) / sn;
      if (a > b) {
        std::swap(a, b);
      }
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    } else if (std::abs(du * cs) > half_len) {
      continue;
    }
    // |-du*sn + dw*cs| <= half_wid
    if (cs != 0.0) {
      double a = (-half_wid + du * sn) / cs;
      double b = (half_wid + du * sn) / cs;
      if (a > b) {
        std::swap(a, b);
      }
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    } else if (std::abs(du * sn) > half_wid) {
      continue;
    }
    if (lo > hi) {
      continue;
    }
    lo = std::clamp(lo, -kFar, kFar);
    hi = std::clamp(hi, -kFar, kFar);
    const int c0 = static_cast<int>(std::ceil(g.y() + lo - 0.5));
    const int c1 = static_cast<int>(std::floor(g.y() + hi - 0.5));
    if (c0 <= c1) {
      out.spans.push_back({r, c0, c1 + 1});
    }
  }
}

Footprint rasterize_footprint_spans(const Pose2 & center, const BoxDims & dims, const GridSpec & spec)
{
  Footprint fp;
  rasterize_footprint_spans(center, dims, spec, fp);
  return fp;
}

Grid rasterize_footprint(const Pose2 & center, const BoxDims & dims, const GridSpec & spec)
{
  Grid grid(spec, GridSemantics::Binary);
  paint(grid, rasterize_footprint_spans(center, dims, spec), 1.0F);
  return grid;
}

namespace detail
{

namespace
{

// Lower envelope of parabolas over one line (Felzenszwalb & Huttenlocher),
// skipping infinite samples.
void edt_line(double * f, int n, std::ptrdiff_t stride, std::vector<double> & buf,
  std::vector<int> & v, std::vector<double> & z)
{
  const double inf = std::numeric_limits<double>::infinity();
  buf.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    buf[static_cast<std::size_t>(i)] = f[i * stride];
  }
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    const double fq = buf[static_cast<std::size_t>(q)];
    if (fq == inf) {
      continue;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = 0.0;
    for (;;) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((fq + static_cast<double>(q) * q) - (buf[static_cast<std::size_t>(p)] + static_cast<double>(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[static_cast<std::size_t>(k)]) {
      // k == 0 and the new parabola dominates everywhere.
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = inf;
  }
  if (k < 0) {
    return;  // no finite samples, the line stays at +inf
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) {
      ++j;
    }
    const int p = v[static_cast<std::size_t>(j)];
    const double d = static_cast<double>(q - p);
    f[q * stride] = d * d + buf[static_cast<std::size_t>(p)];
  }
}

}  // namespace

void squared_edt(GridArray<double> & field)
{
  const int rows = static_cast<int>(field.rows());
  const int cols = static_cast<int>(field.cols());
  std::vector<double> buf;
  std::vector<int> v;
  std::vector<double> z;
  double * data = field.data();
  for (int c = 0; c < cols; ++c) {
    edt_line(data + c, rows, cols, buf, v, z);
  }
  for (int r = 0; r < rows; ++r) {
    edt_line(data + static_cast<std::ptrdiff_t>(r) * cols, cols, 1, buf, v, z);
  }
}

}  // namespace detail

}  // namespace pgmcts
