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

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace pgmcts
{

namespace
{

constexpr std::array<char, 4> kMagic = {'H', 'Y', 'P', 'G'};
constexpr std::size_t kHeaderBytes = 24;

void put_u32(std::vector<unsigned char> & out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFU));
  }
}

std::uint32_t get_u32(const unsigned char * p)
{
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_hypg(const std::string & path, std::span<const Grid> grids)
{
  if (grids.empty()) {
    throw Error(ErrorKind::FormatError, "refusing to write an empty grid dump: " + path);
  }
  const GridSpec & spec = grids.front().spec;
  for (const Grid & g : grids) {
    if (!g.spec.same_shape(spec) || g.values.rows() != spec.rows || g.values.cols() != spec.cols) {
      throw Error(ErrorKind::SpecMismatch, "grids in one dump must share a shape");
    }
  }
  std::vector<unsigned char> bytes;
  const std::size_t cells = static_cast<std::size_t>(spec.rows) * static_cast<std::size_t>(spec.cols);
  bytes.reserve(kHeaderBytes + grids.size() * cells * 4);
  bytes.insert(bytes.end(), kMagic.begin(), kMagic.end());
  put_u32(bytes, kHypgVersion);
  put_u32(bytes, static_cast<std::uint32_t>(spec.rows));
  put_u32(bytes, static_cast<std::uint32_t>(spec.cols));
  put_u32(bytes, static_cast<std::uint32_t>(grids.size()));
  put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(spec.resolution)));
  for (const Grid & g : grids) {
    const float * data = g.values.data();
    for (std::size_t i = 0; i < cells; ++i) {
      put_u32(bytes, std::bit_cast<std::uint32_t>(data[i]));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::FormatError, "cannot open for writing: " + path);
  }
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::FormatError, "write failed: " + path);
  }
}

HypgFile read_hypg(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::FormatError, "cannot open grid dump: " + path);
  }
  std::vector<unsigned char> bytes(
    (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw Error(ErrorKind::FormatError, "missing HYPG header: " + path);
  }
  HypgFile file;
  file.header.version = get_u32(bytes.data() + 4);
  file.header.rows = get_u32(bytes.data() + 8);
  file.header.cols = get_u32(bytes.data() + 12);
  file.header.count = get_u32(bytes.data() + 16);
  file.header.resolution = std::bit_cast<float>(get_u32(bytes.data() + 20));
  if (file.header.version != kHypgVersion) {
    throw Error(ErrorKind::FormatError, "unsupported HYPG version in " + path);
  }
  const std::size_t cells =
    static_cast<std::size_t>(file.header.rows) * static_cast<std::size_t>(file.header.cols);
  if (bytes.size() != kHeaderBytes + cells * file.header.count * 4) {
    throw Error(ErrorKind::FormatError, "HYPG payload size mismatch in " + path);
  }
  const unsigned char * p = bytes.data() + kHeaderBytes;
  for (std::uint32_t t = 0; t < file.header.count; ++t) {
    GridArray<float> g(file.header.rows, file.header.cols);
    float * data = g.data();
    for (std::size_t i = 0; i < cells; ++i, p += 4) {
      data[i] = std::bit_cast<float>(get_u32(p));
    }
    file.grids.push_back(std::move(g));
  }
  return file;
}

}  // namespace pgmcts
