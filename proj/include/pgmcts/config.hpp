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

#ifndef PGMCTS__CONFIG_HPP_
#define PGMCTS__CONFIG_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/occupancy.hpp"
#include "pgmcts/planner.hpp"
#include "pgmcts/proposals.hpp"
#include "pgmcts/simulation.hpp"

#include <string>

namespace pgmcts
{

/// Optional sections `planner`, `proposals`, `occupancy`, `ego_params` and
/// `idm`; every field inside a section is optional. Unknown keys throw
/// FormatError.
struct ConfigFile
{
  PlannerConfig planner;
  ProposalParams proposals;
  OccupancyParams occupancy;
  std::string ego_params_json;  // raw sections, merged field by field onto a scenario
  std::string idm_json;
};

ConfigFile parse_config(const std::string & text);
ConfigFile load_config(const std::string & path);

/// Applies the vehicle and IDM overrides of `cfg` to a scenario.
void apply_overrides(const ConfigFile & cfg, Scenario & scn);

}  // namespace pgmcts

#endif  // PGMCTS__CONFIG_HPP_
