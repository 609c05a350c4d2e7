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

#ifndef PGMCTS__SCENARIO_IO_HPP_
#define PGMCTS__SCENARIO_IO_HPP_

#include "pgmcts/map_geometry.hpp"
#include "pgmcts/simulation.hpp"

#include <string>

namespace pgmcts
{

inline constexpr int kMapVersion = 1;
inline constexpr int kScenarioVersion = 1;

struct MapData
{
  LaneGraph lanes;
  DrivableArea drivable;
};

// JSON documents. Malformed input throws FormatError; semantic problems
// (unknown lanes, missing route) throw ScenarioInvalid.
MapData parse_map(const std::string & text);
MapData load_map(const std::string & path);
std::string map_to_json(const MapData & map);

/// `base_dir` resolves a "map" given as a relative file name.
Scenario parse_scenario(const std::string & text, const std::string & base_dir = ".");
Scenario load_scenario(const std::string & path);
std::string scenario_to_json(const Scenario & scn);
void save_scenario(const std::string & path, const Scenario & scn);

/// Whole-file read; throws FormatError when the file cannot be opened.
std::string read_text_file(const std::string & path);
void write_text_file(const std::string & path, const std::string & text);

}  // namespace pgmcts

#endif  // PGMCTS__SCENARIO_IO_HPP_
