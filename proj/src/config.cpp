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

#include "pgmcts/config.hpp"

#include "json_fields.hpp"
#include "pgmcts/error.hpp"
#include "pgmcts/scenario_io.hpp"

namespace pgmcts
{

using json_fields::json;
using json_fields::read;

namespace
{

void parse_planner(const json & j, PlannerConfig & c)
{
  json_fields::check_keys(
    j, {"iterations", "exploration", "widening_k", "widening_gamma", "macro_ticks", "accel_perturbation",
         "steer_perturbation", "noise_accel", "noise_steer", "alpha", "beta", "out_of_grid_penalty", "seed",
         "parallel_modes", "check_invariants"},
    "planner");
  read(j, "iterations", c.iterations);
  read(j, "exploration", c.exploration);
  read(j, "widening_k", c.widening_k);
  read(j, "widening_gamma", c.widening_gamma);
  read(j, "macro_ticks", c.macro_ticks);
  read(j, "accel_perturbation", c.accel_perturbation);
  read(j, "steer_perturbation", c.steer_perturbation);
  read(j, "noise_accel", c.noise_accel);
  read(j, "noise_steer", c.noise_steer);
  read(j, "alpha", c.alpha);
  read(j, "beta", c.beta);
  if (j.contains("out_of_grid_penalty") && !j.at("out_of_grid_penalty").is_null()) {
    c.out_of_grid_penalty = j.at("out_of_grid_penalty").get<double>();
  }
  read(j, "seed", c.seed);
  read(j, "parallel_modes", c.parallel_modes);
  read(j, "check_invariants", c.check_invariants);
  validate(c);
}

void parse_proposals(const json & j, ProposalParams & p)
{
  json_fields::check_keys(
    j, {"count", "lookahead_min", "lookahead_gain", "accel_mode", "decel_mode", "fallback_speed_limit",
         "start_position_tol", "start_heading_tol", "feasibility_tol", "d_max"},
    "proposals");
  read(j, "count", p.count);
  read(j, "lookahead_min", p.lookahead_min);
  read(j, "lookahead_gain", p.lookahead_gain);
  read(j, "accel_mode", p.accel_mode);
  read(j, "decel_mode", p.decel_mode);
  read(j, "fallback_speed_limit", p.fallback_speed_limit);
  read(j, "start_position_tol", p.start_position_tol);
  read(j, "start_heading_tol", p.start_heading_tol);
  read(j, "feasibility_tol", p.feasibility_tol);
  read(j, "d_max", p.d_max);
  if (p.count < 1 || !(p.lookahead_min > 0.0) || !(p.d_max > 0.0) || !(p.accel_mode > 0.0) ||
      !(p.decel_mode < 0.0)) {
    throw Error(ErrorKind::FormatError, "invalid proposals section");
  }
}

void parse_occupancy(const json & j, OccupancyParams & p)
{
  json_fields::check_keys(
    j, {"sigma0_cells", "sigma_rate_cells", "conflict_window", "reaction_lead", "yield_decel"}, "occupancy");
  read(j, "sigma0_cells", p.sigma0_cells);
  read(j, "sigma_rate_cells", p.sigma_rate_cells);
  read(j, "conflict_window", p.conflict_window);
  read(j, "reaction_lead", p.reaction_lead);
  read(j, "yield_decel", p.yield_decel);
  if (!(p.sigma0_cells > 0.0) || p.sigma_rate_cells < 0.0 || p.conflict_window < 0.0 || p.reaction_lead < 0.0 ||
      !(p.yield_decel < 0.0)) {
    throw Error(ErrorKind::FormatError, "invalid occupancy section");
  }
}

}  // namespace

ConfigFile parse_config(const std::string & text)
{
  const json doc = json_fields::parse_document(text, "config");
  try {
    json_fields::check_keys(doc, {"planner", "proposals", "occupancy", "ego_params", "idm"}, "config");
    ConfigFile cfg;
    if (doc.contains("planner")) {
      parse_planner(doc.at("planner"), cfg.planner);
    }
    if (doc.contains("proposals")) {
      parse_proposals(doc.at("proposals"), cfg.proposals);
    }
    if (doc.contains("occupancy")) {
      parse_occupancy(doc.at("occupancy"), cfg.occupancy);
    }
    if (doc.contains("ego_params")) {
      VehicleParams probe;
      json_fields::merge_vehicle_params(doc.at("ego_params"), probe);
      cfg.ego_params_json = doc.at("ego_params").dump();
    }
    if (doc.contains("idm")) {
      IdmParams probe;
      json_fields::merge_idm(doc.at("idm"), probe);
      cfg.idm_json = doc.at("idm").dump();
    }
    return cfg;
  } catch (const json::exception & e) {
    throw Error(ErrorKind::FormatError, std::string("config: ") + e.what());
  }
}

ConfigFile load_config(const std::string & path) { return parse_config(read_text_file(path)); }

void apply_overrides(const ConfigFile & cfg, Scenario & scn)
{
  if (!cfg.ego_params_json.empty()) {
    json_fields::merge_vehicle_params(json::parse(cfg.ego_params_json), scn.ego_params);
  }
  if (!cfg.idm_json.empty()) {
    json_fields::merge_idm(json::parse(cfg.idm_json), scn.idm);
  }
}

}  // namespace pgmcts
