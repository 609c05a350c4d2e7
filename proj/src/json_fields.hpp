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

// Internal helpers shared by the JSON readers.

#ifndef PGMCTS__SRC__JSON_FIELDS_HPP_
#define PGMCTS__SRC__JSON_FIELDS_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/error.hpp"
#include "pgmcts/simulation.hpp"

#include <json.hpp>

#include <algorithm>
#include <initializer_list>
#include <string>

namespace pgmcts::json_fields
{

using nlohmann::json;

inline void require_object(const json & j, const std::string & where)
{
  if (!j.is_object()) {
    throw Error(ErrorKind::FormatError, where + " must be a JSON object");
  }
}

inline void check_keys(const json & j, std::initializer_list<const char *> allowed, const std::string & where)
{
  require_object(j, where);
  for (const auto & item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char * k) { return item.key() == k; });
    if (!known) {
      throw Error(ErrorKind::FormatError, where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json & j, const char * key, T & out)
{
  if (j.contains(key) && !j.at(key).is_null()) {
    out = j.at(key).get<T>();
  }
}

inline void merge_vehicle_params(const json & j, VehicleParams & p)
{
  check_keys(
    j, {"wheelbase", "length", "width", "accel_min", "accel_max", "steer_max", "jerk_max"}, "ego_params");
  read(j, "wheelbase", p.wheelbase);
  read(j, "length", p.length);
  read(j, "width", p.width);
  read(j, "accel_min", p.accel_min);
  read(j, "accel_max", p.accel_max);
  read(j, "steer_max", p.steer_max);
  read(j, "jerk_max", p.jerk_max);
  validate(p);
}

inline json vehicle_params_to_json(const VehicleParams & p)
{
  return {{"wheelbase", p.wheelbase}, {"length", p.length}, {"width", p.width}, {"accel_min", p.accel_min},
    {"accel_max", p.accel_max}, {"steer_max", p.steer_max}, {"jerk_max", p.jerk_max}};
}

inline void merge_idm(const json & j, IdmParams & p)
{
  check_keys(
    j, {"desired_speed", "fallback_speed", "time_headway", "min_gap", "accel_max", "comfortable_decel",
         "decel_floor", "leader_lateral_band"},
    "idm");
  if (j.contains("desired_speed")) {
    p.desired_speed = j.at("desired_speed").is_null() ? std::nullopt
                                                      : std::optional<double>(j.at("desired_speed").get<double>());
  }
  read(j, "fallback_speed", p.fallback_speed);
  read(j, "time_headway", p.time_headway);
  read(j, "min_gap", p.min_gap);
  read(j, "accel_max", p.accel_max);
  read(j, "comfortable_decel", p.comfortable_decel);
  read(j, "decel_floor", p.decel_floor);
  read(j, "leader_lateral_band", p.leader_lateral_band);
  validate(p);
}

inline json idm_to_json(const IdmParams & p)
{
  json j = {{"fallback_speed", p.fallback_speed}, {"time_headway", p.time_headway}, {"min_gap", p.min_gap},
    {"accel_max", p.accel_max}, {"comfortable_decel", p.comfortable_decel}, {"decel_floor", p.decel_floor},
    {"leader_lateral_band", p.leader_lateral_band}};
  j["desired_speed"] = p.desired_speed ? json(*p.desired_speed) : json(nullptr);
  return j;
}

inline json parse_document(const std::string & text, const std::string & where)
{
  try {
    return json::parse(text);
  } catch (const json::exception & e) {
    throw Error(ErrorKind::FormatError, where + ": " + e.what());
  }
}

}  // namespace pgmcts::json_fields

#endif  // PGMCTS__SRC__JSON_FIELDS_HPP_
