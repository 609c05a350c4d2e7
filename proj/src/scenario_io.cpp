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

#include "pgmcts/scenario_io.hpp"

#include "json_fields.hpp"
#include "pgmcts/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pgmcts
{

using json_fields::json;

namespace
{

Vec2 parse_point(const json & j)
{
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::FormatError, "points are [x, y] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Polyline parse_polyline(const json & j)
{
  if (!j.is_array()) {
    throw Error(ErrorKind::FormatError, "polylines are arrays of [x, y] pairs");
  }
  Polyline out;
  for (const auto & p : j) {
    out.push_back(parse_point(p));
  }
  return out;
}

json polyline_json(const Polyline & line)
{
  json out = json::array();
  for (const Vec2 & p : line) {
    out.push_back({p.x(), p.y()});
  }
  return out;
}

MapData map_from_json(const json & doc)
{
  json_fields::check_keys(doc, {"map_version", "lanes", "drivable"}, "map");
  if (doc.at("map_version").get<int>() != kMapVersion) {
    throw Error(ErrorKind::FormatError, "unsupported map_version");
  }
  std::vector<Lane> lanes;
  for (const auto & jl : doc.at("lanes")) {
    json_fields::check_keys(jl, {"id", "centerline", "successors", "left", "right", "speed_limit"}, "lane");
    Lane lane;
    lane.id = jl.at("id").get<LaneId>();
    lane.centerline = parse_polyline(jl.at("centerline"));
    json_fields::read(jl, "successors", lane.successors);
    if (jl.contains("left") && !jl.at("left").is_null()) {
      lane.left = jl.at("left").get<LaneId>();
    }
    if (jl.contains("right") && !jl.at("right").is_null()) {
      lane.right = jl.at("right").get<LaneId>();
    }
    if (jl.contains("speed_limit") && !jl.at("speed_limit").is_null()) {
      lane.speed_limit = jl.at("speed_limit").get<double>();
    }
    lanes.push_back(std::move(lane));
  }
  MapData map;
  map.lanes = LaneGraph(std::move(lanes));
  std::vector<Polyline> polygons;
  if (doc.contains("drivable")) {
    for (const auto & jp : doc.at("drivable")) {
      polygons.push_back(parse_polyline(jp));
    }
  }
  map.drivable = make_drivable_area(std::move(polygons));
  return map;
}

json map_json(const MapData & map)
{
  json lanes = json::array();
  for (const Lane & l : map.lanes.lanes()) {
    json jl = {{"id", l.id}, {"centerline", polyline_json(l.centerline)}, {"successors", l.successors}};
    jl["left"] = l.left ? json(*l.left) : json(nullptr);
    jl["right"] = l.right ? json(*l.right) : json(nullptr);
    jl["speed_limit"] = l.speed_limit ? json(*l.speed_limit) : json(nullptr);
    lanes.push_back(std::move(jl));
  }
  json drivable = json::array();
  for (const Polyline & p : map.drivable.polygons) {
    drivable.push_back(polyline_json(p));
  }
  return {{"map_version", kMapVersion}, {"lanes", lanes}, {"drivable", drivable}};
}

Trajectory parse_trajectory(const json & j)
{
  json_fields::check_keys(j, {"dt", "states"}, "reference");
  Trajectory t;
  json_fields::read(j, "dt", t.dt);
  for (const auto & row : j.at("states")) {
    if (!row.is_array() || row.size() != 4) {
      throw Error(ErrorKind::FormatError, "trajectory states are [x, y, theta, v] rows");
    }
    VehicleState s;
    s.x = row[0].get<double>();
    s.y = row[1].get<double>();
    s.theta = row[2].get<double>();
    s.v = row[3].get<double>();
    t.states.push_back(s);
  }
  return t;
}

json trajectory_json(const Trajectory & t)
{
  json rows = json::array();
  for (const VehicleState & s : t.states) {
    rows.push_back({s.x, s.y, s.theta, s.v});
  }
  return {{"dt", t.dt}, {"states", rows}};
}

template <typename F>
auto wrap_format_errors(const std::string & where, F && f)
{
  try {
    return f();
  } catch (const json::exception & e) {
    throw Error(ErrorKind::FormatError, where + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::FormatError, "path not found or unreadable: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string & path, const std::string & text)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::FormatError, "cannot open for writing: " + path);
  }
  out << text;
  if (!out) {
    throw Error(ErrorKind::FormatError, "write failed: " + path);
  }
}

MapData parse_map(const std::string & text)
{
  return wrap_format_errors("map", [&] { return map_from_json(json_fields::parse_document(text, "map")); });
}

MapData load_map(const std::string & path) { return parse_map(read_text_file(path)); }

std::string map_to_json(const MapData & map) { return map_json(map).dump(1) + "\n"; }

Scenario parse_scenario(const std::string & text, const std::string & base_dir)
{
  const json doc = json_fields::parse_document(text, "scenario");
  return wrap_format_errors("scenario", [&] {
    json_fields::check_keys(
      doc, {"scenario_version", "id", "mode", "duration", "map", "ego", "ego_params", "agents", "reference", "idm"},
      "scenario");
    if (doc.at("scenario_version").get<int>() != kScenarioVersion) {
      throw Error(ErrorKind::FormatError, "unsupported scenario_version");
    }
    Scenario scn;
    scn.id = doc.at("id").get<std::string>();
    scn.mode = parse_sim_mode(doc.value("mode", std::string("nr")));
    scn.duration = doc.at("duration").get<double>();

    MapData map;
    const json & jm = doc.at("map");
    if (jm.is_string()) {
      std::filesystem::path p(jm.get<std::string>());
      if (p.is_relative()) {
        p = std::filesystem::path(base_dir) / p;
      }
      map = load_map(p.string());
    } else {
      map = map_from_json(jm);
    }
    scn.lanes = std::move(map.lanes);
    scn.drivable = std::move(map.drivable);

    const json & je = doc.at("ego");
    json_fields::check_keys(je, {"state", "accel", "steer", "route"}, "ego");
    const json & st = je.at("state");
    if (!st.is_array() || st.size() != 4) {
      throw Error(ErrorKind::FormatError, "ego state is [x, y, theta, v]");
    }
    scn.ego.x = st[0].get<double>();
    scn.ego.y = st[1].get<double>();
    scn.ego.theta = st[2].get<double>();
    scn.ego.v = st[3].get<double>();
    json_fields::read(je, "accel", scn.ego.accel);
    json_fields::read(je, "steer", scn.ego.steer);
    const json & jr = je.at("route");
    json_fields::check_keys(jr, {"start", "goal"}, "route");
    scn.route_start = jr.at("start").get<LaneId>();
    scn.route_goal = jr.at("goal").get<LaneId>();
    if (doc.contains("ego_params")) {
      json_fields::merge_vehicle_params(doc.at("ego_params"), scn.ego_params);
    }
    if (doc.contains("idm")) {
      json_fields::merge_idm(doc.at("idm"), scn.idm);
    }
    try {
      scn.route = extract_route(scn.lanes, scn.route_start, scn.route_goal);
    } catch (const Error & e) {
      throw Error(ErrorKind::ScenarioInvalid, scn.id + ": " + e.what());
    }

    if (doc.contains("agents")) {
      for (const auto & ja : doc.at("agents")) {
        json_fields::check_keys(ja, {"id", "length", "width", "lane", "speed", "poses"}, "agent");
        ScenarioAgent a;
        a.id = ja.at("id").get<std::string>();
        a.dims.length = ja.at("length").get<double>();
        a.dims.width = ja.at("width").get<double>();
        if (ja.contains("lane") && !ja.at("lane").is_null()) {
          a.lane = ja.at("lane").get<LaneId>();
        }
        json_fields::read(ja, "speed", a.speed);
        for (const auto & row : ja.at("poses")) {
          if (!row.is_array() || row.size() != 3) {
            throw Error(ErrorKind::FormatError, "agent poses are [x, y, theta] rows");
          }
          a.log.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
        if (a.log.empty()) {
          throw Error(ErrorKind::ScenarioInvalid, scn.id + ": agent " + a.id + " has no poses");
        }
        scn.agents.push_back(std::move(a));
      }
    }
    if (doc.contains("reference") && !doc.at("reference").is_null()) {
      scn.reference = parse_trajectory(doc.at("reference"));
    }
    validate(scn, scn.mode);
    return scn;
  });
}

Scenario load_scenario(const std::string & path)
{
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_scenario(read_text_file(path), base.empty() ? "." : base);
}

std::string scenario_to_json(const Scenario & scn)
{
  json doc;
  doc["scenario_version"] = kScenarioVersion;
  doc["id"] = scn.id;
  doc["mode"] = to_string(scn.mode);
  doc["duration"] = scn.duration;
  doc["map"] = map_json({scn.lanes, scn.drivable});
  doc["ego"] = {{"state", {scn.ego.x, scn.ego.y, scn.ego.theta, scn.ego.v}}, {"accel", scn.ego.accel},
    {"steer", scn.ego.steer}, {"route", {{"start", scn.route_start}, {"goal", scn.route_goal}}}};
  doc["ego_params"] = json_fields::vehicle_params_to_json(scn.ego_params);
  doc["idm"] = json_fields::idm_to_json(scn.idm);
  json agents = json::array();
  for (const ScenarioAgent & a : scn.agents) {
    json poses = json::array();
    for (const Pose2 & p : a.log) {
      poses.push_back({p.x, p.y, p.theta});
    }
    json ja = {{"id", a.id}, {"length", a.dims.length}, {"width", a.dims.width}, {"speed", a.speed}, {"poses", poses}};
    ja["lane"] = a.lane ? json(*a.lane) : json(nullptr);
    agents.push_back(std::move(ja));
  }
  doc["agents"] = agents;
  if (scn.reference) {
    doc["reference"] = trajectory_json(*scn.reference);
  }
  return doc.dump(1) + "\n";
}

void save_scenario(const std::string & path, const Scenario & scn) { write_text_file(path, scenario_to_json(scn)); }

}  // namespace pgmcts
