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

#ifndef PGMCTS__RASTER_HPP_
#define PGMCTS__RASTER_HPP_

#include "pgmcts/error.hpp"
#include "pgmcts/geometry.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pgmcts
{

/// Ego-centric raster frame. The ego origin maps to cell (rows/2, cols/2);
/// +row points along the ego heading, +col to its left.
struct GridSpec
{
  int rows = 400;
  int cols = 400;
  double resolution = 0.25;
  Pose2 origin;

  int center_row() const { return rows / 2; }
  int center_col() const { return cols / 2; }

  /// Continuous cell coordinates; floor() of each component is the cell index.
  Vec2 to_grid(const Vec2 & world) const
  {
    const Vec2 d = world - origin.position();
    const double c = std::cos(origin.theta);
    const double s = std::sin(origin.theta);
    const double forward = d.x() * c + d.y() * s;
    const double left = -d.x() * s + d.y() * c;
    return {forward / resolution + center_row(), left / resolution + center_col()};
  }

  Vec2 to_world(const Vec2 & grid) const
  {
    const double forward = (grid.x() - center_row()) * resolution;
    const double left = (grid.y() - center_col()) * resolution;
    const double c = std::cos(origin.theta);
    const double s = std::sin(origin.theta);
    return origin.position() + Vec2(forward * c - left * s, forward * s + left * c);
  }

  bool contains(int row, int col) const { return row >= 0 && row < rows && col >= 0 && col < cols; }

  bool same_shape(const GridSpec & other) const
  {
    return rows == other.rows && cols == other.cols && resolution == other.resolution;
  }
};

/// Throws FormatError on non-positive sizes or resolution.
void validate(const GridSpec & spec);

struct Cell
{
  int row = 0;
  int col = 0;

  bool operator==(const Cell &) const = default;
};

enum class GridSemantics { Binary, Probability, Distance, Direction };

/// Half-open block of cells [row0, row1) x [col0, col1).
struct CellBox
{
  int row0 = 0;
  int col0 = 0;
  int row1 = 0;
  int col1 = 0;

  bool empty() const { return row1 <= row0 || col1 <= col0; }
  void include(const CellBox & other)
  {
    if (other.empty()) {
      return;
    }
    if (empty()) {
      *this = other;
      return;
    }
    row0 = std::min(row0, other.row0);
    col0 = std::min(col0, other.col0);
    row1 = std::max(row1, other.row1);
    col1 = std::max(col1, other.col1);
  }
};

template <typename Scalar>
using GridArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
struct BasicGrid
{
  GridSpec spec;
  GridSemantics semantics = GridSemantics::Binary;
  GridArray<Scalar> values;
  // Set by the buffer-reusing builders: every cell outside this box holds the
  // fill value. Unset means unknown.
  std::optional<CellBox> dirty;

  BasicGrid() = default;
  BasicGrid(const GridSpec & s, GridSemantics sem, Scalar fill = Scalar(0))
  : spec(s), semantics(sem), values(GridArray<Scalar>::Constant(s.rows, s.cols, fill))
  {
  }

  Scalar operator()(int row, int col) const { return values(row, col); }
  Scalar & operator()(int row, int col) { return values(row, col); }
  Scalar at(const Cell & c) const { return values(c.row, c.col); }

  /// Sets every cell to `fill`, touching only the dirty box when it is known.
  /// The spec must not change shape.
  void refill(Scalar fill)
  {
    if (dirty) {
      if (!dirty->empty()) {
        values.block(dirty->row0, dirty->col0, dirty->row1 - dirty->row0, dirty->col1 - dirty->col0)
          .setConstant(fill);
      }
    } else {
      values.setConstant(fill);
    }
    dirty = CellBox{};
  }
};

using Grid = BasicGrid<float>;

std::optional<Cell> world_to_cell(const Vec2 & point, const GridSpec & spec);

/// World position of the cell center.
Vec2 cell_to_world(const Cell & cell, const GridSpec & spec);

/// Half-open run of cells [col_begin, col_end) on one row. Spans are not
/// clipped to the grid.
struct RowSpan
{
  int row = 0;
  int col_begin = 0;
  int col_end = 0;

  int width() const { return col_end - col_begin; }
};

/// Set of cells whose centers lie inside an oriented rectangle, as row spans
/// in ascending row order. Doubles as the ego kernel of the cost function.
struct Footprint
{
  std::vector<RowSpan> spans;

  std::size_t cell_count() const;
  bool fully_inside(const GridSpec & spec) const;
  bool empty() const { return spans.empty(); }
  /// Restricts the spans to the grid.
  Footprint clipped(const GridSpec & spec) const;
};

using EgoKernel = Footprint;

/// Cell-center inclusion (boundary counts as inside). Scanline evaluation.
void rasterize_footprint_spans(
  const Pose2 & center, const BoxDims & dims, const GridSpec & spec, Footprint & out);

Footprint rasterize_footprint_spans(const Pose2 & center, const BoxDims & dims, const GridSpec & spec);

/// Binary grid with ones on the footprint cells inside the grid.
Grid rasterize_footprint(const Pose2 & center, const BoxDims & dims, const GridSpec & spec);

/// Writes `value` into every in-grid footprint cell.
template <typename Scalar>
void paint(BasicGrid<Scalar> & grid, const Footprint & fp, Scalar value)
{
  for (const RowSpan & s : fp.spans) {
    if (s.row < 0 || s.row >= grid.spec.rows) {
      continue;
    }
    const int b = std::max(0, s.col_begin);
    const int e = std::min(grid.spec.cols, s.col_end);
    if (b < e) {
      grid.values.row(s.row).segment(b, e - b) = value;
    }
  }
}

/// Sum of grid values over the in-grid footprint cells.
template <typename Scalar>
double sum_under(const BasicGrid<Scalar> & grid, const Footprint & fp)
{
  double total = 0.0;
  for (const RowSpan & s : fp.spans) {
    if (s.row < 0 || s.row >= grid.spec.rows) {
      continue;
    }
    const int b = std::max(0, s.col_begin);
    const int e = std::min(grid.spec.cols, s.col_end);
    const Scalar * row = grid.values.data() + static_cast<std::ptrdiff_t>(s.row) * grid.spec.cols;
    for (int c = b; c < e; ++c) {
      total += row[c];
    }
  }
  return total;
}

namespace detail
{
/// In-place exact squared Euclidean distance transform (cell units) of a
/// row-major field holding 0 on sources and +inf elsewhere.
void squared_edt(GridArray<double> & field);
}  // namespace detail

/// Exact Euclidean distance (meters) from each cell center to the nearest
/// non-zero cell center. Throws EmptySource when no cell is set.
template <typename Scalar>
BasicGrid<Scalar> distance_transform(const BasicGrid<Scalar> & source)
{
  const double inf = std::numeric_limits<double>::infinity();
  GridArray<double> field = (source.values != Scalar(0)).template cast<double>();
  if ((field == 0.0).all()) {
    throw Error(ErrorKind::EmptySource, "distance transform source has no set cell");
  }
  field = (field > 0.0).select(GridArray<double>::Zero(field.rows(), field.cols()), inf);
  detail::squared_edt(field);
  BasicGrid<Scalar> out;
  out.spec = source.spec;
  out.semantics = GridSemantics::Distance;
  out.values = (field.sqrt() * source.spec.resolution).template cast<Scalar>();
  return out;
}

// Grid dump format: little-endian header (magic "HYPG", u32 version,
// u32 rows, u32 cols, u32 count, f32 resolution) then count*rows*cols
// float32 values, row-major, grid after grid.
inline constexpr std::uint32_t kHypgVersion = 1;

struct HypgHeader
{
  std::uint32_t version = kHypgVersion;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t count = 0;
  float resolution = 0.0F;
};

struct HypgFile
{
  HypgHeader header;
  std::vector<GridArray<float>> grids;
};

void write_hypg(const std::string & path, std::span<const Grid> grids);
HypgFile read_hypg(const std::string & path);  // throws FormatError

}  // namespace pgmcts

#endif  // PGMCTS__RASTER_HPP_
