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

#include "pgmcts/cli.hpp"

#include "pgmcts/bench.hpp"
#include "pgmcts/config.hpp"
#include "pgmcts/error.hpp"
#include "pgmcts/input_layers.hpp"
#include "pgmcts/scenario_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

namespace pgmcts::cli
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

json state_json(const VehicleState & s) { return {s.x, s.y, s.theta, s.v}; }

json trajectory_rows(const Trajectory & t)
{
  json rows = json::array();
  for (const VehicleState & s : t.states) {
    rows.push_back(state_json(s));
  }
  return rows;
}

json stats_json(const std::vector<double> & values)
{
  if (values.empty()) {
    return {{"mean", nullptr}, {"min", nullptr}, {"max", nullptr}};
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  return {{"mean", sum / static_cast<double>(values.size())},
    {"min", *std::min_element(values.begin(), values.end())},
    {"max", *std::max_element(values.begin(), values.end())}};
}

std::vector<std::string> expand_scenarios(const std::vector<std::string> & paths)
{
  std::vector<std::string> out;
  for (const std::string & p : paths) {
    if (!fs::exists(p)) {
      throw Error(ErrorKind::FormatError, "path not found: " + p);
    }
    if (fs::is_directory(p)) {
      std::vector<std::string> files;
      for (const auto & entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          files.push_back(entry.path().string());
        }
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

SimConfig make_sim_config(
  const ConfigFile & cfg, const std::string & predictor, const std::string & proposals, std::uint64_t seed)
{
  SimConfig sc;
  sc.planner = cfg.planner;
  sc.proposals = cfg.proposals;
  sc.occupancy = cfg.occupancy;
  sc.predictor = predictor;
  sc.proposal_source = proposals;
  sc.seed = seed;
  make_predictor(predictor, sc.occupancy);  // rejects unknown names before any scenario runs
  return sc;
}

}  // namespace

std::string metrics_json(const SimResult & result, std::uint64_t seed, const std::string & predictor)
{
  const Metrics & m = result.metrics;
  json doc;
  doc["scenario"] = result.scenario_id;
  doc["mode"] = to_string(result.mode);
  doc["seed"] = seed;
  doc["predictor"] = predictor;
  doc["collision"] = m.collision;
  doc["collision_tick"] = m.collision_tick ? json(*m.collision_tick) : json(nullptr);
  doc["collision_time"] = m.collision_tick ? json(*m.collision_tick * result.ego.dt) : json(nullptr);
  doc["offroad_fraction"] = m.offroad_fraction;
  doc["progress_ratio"] = m.progress_ratio;
  doc["ticks"] = m.ticks;
  doc["aborted"] = result.aborted;
  doc["error"] = result.error;
  doc["ego_trajectory"] = trajectory_rows(result.ego);
  json plans = json::array();
  for (const TickLog & t : result.ticks) {
    plans.push_back({{"tick", t.tick}, {"mode", t.mode}, {"cost", t.cost}, {"mode_costs", t.mode_costs}});
  }
  doc["plans"] = plans;
  return doc.dump(1) + "\n";
}

std::string timing_json(const SimResult & result)
{
  json doc;
  doc["scenario"] = result.scenario_id;
  doc["latency_ms"] = result.latency_ms;
  doc["latency_ms_stats"] = stats_json(result.latency_ms);
  return doc.dump(1) + "\n";
}

std::string frames_jsonl(const Scenario & scn, const SimResult & result)
{
  std::string out;
  for (const TickLog & t : result.ticks) {
    const auto k = static_cast<std::size_t>(t.tick);
    json agents = json::array();
    for (std::size_t a = 0; a < scn.agents.size() && k < result.agent_poses.size(); ++a) {
      const Pose2 & p = result.agent_poses[k][a];
      agents.push_back({{"id", scn.agents[a].id}, {"pose", {p.x, p.y, p.theta}}});
    }
    json proposals = json::array();
    for (const Trajectory & m : t.proposals) {
      proposals.push_back(trajectory_rows(m));
    }
    json frame = {{"tick", t.tick}, {"ego", state_json(result.ego[k])}, {"agents", agents}, {"mode", t.mode},
      {"cost", t.cost}, {"plan", trajectory_rows(t.plan)}, {"proposals", proposals}};
    out += frame.dump() + "\n";
  }
  return out;
}

int cmd_run(const RunOptions & opts, std::ostream & out, std::ostream & err)
{
  std::vector<std::string> files;
  SimConfig sc;
  try {
    const ConfigFile cfg = opts.config.empty() ? ConfigFile{} : load_config(opts.config);
    files = expand_scenarios(opts.scenarios);
    if (files.empty()) {
      throw Error(ErrorKind::FormatError, "no scenario files given");
    }
    sc = make_sim_config(cfg, opts.predictor, opts.proposals, opts.seed);
    if (opts.mode) {
      sc.mode_override = parse_sim_mode(*opts.mode);
    }
    sc.record_frames = opts.frames;
    sc.planner.log_rollouts = !opts.rollout_log.empty();
    fs::create_directories(opts.out);

    std::ofstream rollout_log;
    if (!opts.rollout_log.empty()) {
      rollout_log.open(opts.rollout_log, std::ios::trunc);
      if (!rollout_log) {
        throw Error(ErrorKind::FormatError, "cannot open rollout log: " + opts.rollout_log);
      }
    }

    bool failed = false;
    json rows = json::array();
    std::vector<double> offroad;
    std::vector<double> progress;
    int collisions = 0;
    for (const std::string & path : files) {
      Scenario scn;
      try {
        scn = load_scenario(path);
        apply_overrides(cfg, scn);
      } catch (const Error & e) {
        err << "error: " << path << ": " << e.what() << "\n";
        failed = true;
        continue;
      }
      const SimResult result = run_closed_loop(scn, sc);
      const std::string name = scn.id + "_" + to_string(result.mode);
      const fs::path dir = fs::path(opts.out) / name;
      fs::create_directories(dir);
      write_text_file((dir / "metrics.json").string(), metrics_json(result, opts.seed, opts.predictor));
      write_text_file((dir / "timing.json").string(), timing_json(result));
      if (opts.frames) {
        write_text_file((dir / "frames.jsonl").string(), frames_jsonl(scn, result));
      }
      if (rollout_log.is_open()) {
        for (const TickLog & t : result.ticks) {
          for (const RolloutRecord & r : t.rollouts) {
            rollout_log << json{{"scenario", scn.id}, {"tick", t.tick}, {"mode", r.mode}, {"iteration", r.iteration},
                             {"leaf_depth", r.leaf_depth}, {"cost", r.cost}}
                             .dump()
                        << "\n";
          }
        }
      }
      const Metrics & m = result.metrics;
      out << name << ": collision=" << (m.collision ? "true" : "false") << " offroad=" << m.offroad_fraction
          << " progress=" << m.progress_ratio << " ticks=" << m.ticks << (result.aborted ? " ABORTED" : "") << "\n";
      if (result.aborted) {
        err << "error: " << result.error << "\n";
        failed = true;
      }
      collisions += m.collision ? 1 : 0;
      offroad.push_back(m.offroad_fraction);
      progress.push_back(m.progress_ratio);
      rows.push_back({{"scenario", scn.id}, {"mode", to_string(result.mode)}, {"collision", m.collision},
        {"offroad_fraction", m.offroad_fraction}, {"progress_ratio", m.progress_ratio}, {"aborted", result.aborted}});
    }
    json summary;
    summary["seed"] = opts.seed;
    summary["predictor"] = opts.predictor;
    summary["count"] = rows.size();
    summary["collisions"] = collisions;
    summary["collision_rate"] = rows.empty() ? 0.0 : static_cast<double>(collisions) / static_cast<double>(rows.size());
    summary["offroad_fraction"] = stats_json(offroad);
    summary["progress_ratio"] = stats_json(progress);
    summary["scenarios"] = rows;
    write_text_file((fs::path(opts.out) / "summary.json").string(), summary.dump(1) + "\n");
    return failed ? 2 : 0;
  } catch (const Error & e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error & e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_dump_grids(const DumpOptions & opts, std::ostream & out, std::ostream & err)
{
  try {
    const ConfigFile cfg = opts.config.empty() ? ConfigFile{} : load_config(opts.config);
    Scenario scn = load_scenario(opts.scenario);
    apply_overrides(cfg, scn);
    if (opts.tick < 0 || opts.tick >= scn.ticks()) {
      throw Error(ErrorKind::FormatError, "tick " + std::to_string(opts.tick) + " outside the scenario duration");
    }
    SimConfig sc = make_sim_config(cfg, opts.predictor, opts.proposals, opts.seed);

    // Replays the closed loop up to the requested tick.
    Trajectory executed;
    executed.states.push_back(scn.ego);
    std::vector<std::vector<Pose2>> poses{{}};
    for (const ScenarioAgent & a : scn.agents) {
      poses[0].push_back(a.log.front());
    }
    if (opts.tick > 0) {
      Scenario prefix = scn;
      prefix.duration = opts.tick * scn.dt;
      const SimResult r = run_closed_loop(prefix, sc);
      if (r.aborted || static_cast<int>(r.ego.size()) != opts.tick + 1) {
        throw Error(ErrorKind::ScenarioInvalid, scn.id + ": episode ended before tick " + std::to_string(opts.tick));
      }
      executed = r.ego;
      poses = r.agent_poses;
    }
    const VehicleState ego = executed.states.back();
    GridSpec spec = sc.grid;
    spec.origin = ego.pose();
    const ProposalSet set = sc.proposal_source == "sampler"
                              ? sample_centerline_proposals(ego, scn.route, scn.ego_params, sc.proposals.count,
                                  sc.proposals, &scn.lanes)
                              : load_proposals(sc.proposal_source.substr(5), ego, scn.ego_params, sc.proposals);
    const std::vector<AgentTrack> tracks = agent_history(scn, poses, opts.tick);
    const auto predictor = make_predictor(sc.predictor, sc.occupancy);
    std::vector<OccupancySequence> occ;
    std::vector<DeviationMaps> dev;
    for (std::size_t m = 0; m < set.size(); ++m) {
      occ.push_back(predictor->predict(tracks, set.modes[m], scn.ego_params, spec, {opts.tick, static_cast<int>(m)}));
      dev.push_back(build_deviation_maps(set.modes[m], scn.ego_params, spec, sc.proposals.d_max));
    }
    PlannerConfig pc = sc.planner;
    pc.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(opts.tick));
    const PlanResult planned = plan(ego, set, occ, dev, scn.ego_params, pc);
    const int mode = opts.mode.value_or(planned.mode);
    if (mode < 0 || mode >= static_cast<int>(set.size())) {
      throw Error(ErrorKind::FormatError, "mode " + std::to_string(mode) + " out of range");
    }
    const auto um = static_cast<std::size_t>(mode);
    const InputLayers layers = build_input_layers(
      ego_history(executed, opts.tick), tracks, scn.lanes, scn.drivable, set.modes[um], scn.ego_params, spec);

    std::vector<Grid> cost;
    for (std::size_t t = 0; t < occ[um].size(); ++t) {
      Grid g(spec, GridSemantics::Distance);
      g.values = sc.planner.alpha * occ[um].grids[t].values + sc.planner.beta * dev[um].maps[t].values;
      cost.push_back(std::move(g));
    }
    fs::create_directories(opts.out);
    const fs::path dir(opts.out);
    write_hypg((dir / "P.hypg").string(), layers.pose);
    write_hypg((dir / "S.hypg").string(), layers.statics);
    write_hypg((dir / "E.hypg").string(), layers.ego);
    write_hypg((dir / "occupancy.hypg").string(), occ[um].grids);
    write_hypg((dir / "deviation.hypg").string(), dev[um].maps);
    write_hypg((dir / "cost.hypg").string(), cost);
    json info = {{"scenario", scn.id}, {"tick", opts.tick}, {"mode", mode}, {"planner_mode", planned.mode},
      {"cost", planned.cost}, {"files", {"P.hypg", "S.hypg", "E.hypg", "occupancy.hypg", "deviation.hypg", "cost.hypg"}}};
    write_text_file((dir / "dump.json").string(), info.dump(1) + "\n");
    out << "wrote grids for " << scn.id << " tick " << opts.tick << " mode " << mode << " to " << opts.out << "\n";
    return 0;
  } catch (const Error & e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error & e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_bench(const BenchOptions & opts, std::ostream & out, std::ostream & err)
{
  try {
    const ConfigFile cfg = opts.config.empty() ? ConfigFile{} : load_config(opts.config);
    const BenchReport report = run_bench(cfg, opts.repetitions, opts.seed);
    out << format_bench(report);
    return 0;
  } catch (const Error & e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_validate(const std::vector<std::string> & paths, std::ostream & out, std::ostream & err)
{
  bool failed = false;
  for (const std::string & path : paths) {
    try {
      const std::string text = read_text_file(path);
      json doc;
      try {
        doc = json::parse(text);
      } catch (const json::exception & e) {
        throw Error(ErrorKind::FormatError, e.what());
      }
      std::string kind;
      if (doc.contains("scenario_version")) {
        const std::string base = fs::path(path).parent_path().string();
        parse_scenario(text, base.empty() ? "." : base);
        kind = "scenario";
      } else if (doc.contains("map_version")) {
        parse_map(text);
        kind = "map";
      } else if (doc.contains("modes")) {
        // Schema only; feasibility needs an ego state.
        if (doc.value("version", 0) != 1 || !doc.contains("dt") || !doc.at("modes").is_array() ||
            doc.at("modes").empty()) {
          throw Error(ErrorKind::FormatError, "proposal files need version 1, dt and a non-empty modes array");
        }
        std::size_t length = 0;
        for (const auto & m : doc.at("modes")) {
          if (!m.contains("score") || !m.at("score").is_number() || m.at("score").get<double>() < 0.0) {
            throw Error(ErrorKind::FormatError, "every mode needs a non-negative score");
          }
          const auto & states = m.at("states");
          if (length != 0 && states.size() != length) {
            throw Error(ErrorKind::FormatError, "modes differ in length");
          }
          length = states.size();
          for (const auto & row : states) {
            if (!row.is_array() || row.size() != 4) {
              throw Error(ErrorKind::FormatError, "proposal states are [x, y, theta, v] rows");
            }
          }
        }
        kind = "proposals";
      } else {
        parse_config(text);
        kind = "config";
      }
      out << "OK " << path << " (" << kind << ")\n";
    } catch (const Error & e) {
      err << "FAIL " << path << ": " << e.what() << "\n";
      failed = true;
    } catch (const json::exception & e) {
      err << "FAIL " << path << ": " << e.what() << "\n";
      failed = true;
    }
  }
  return failed ? 2 : 0;
}

int main_entry(int argc, char ** argv)
{
  CLI::App app{"Proposal-guided MCTS motion planner and closed-loop simulator"};
  app.require_subcommand(1);

  RunOptions run;
  std::string run_mode;
  auto * run_cmd = app.add_subcommand("run", "Run scenarios in closed loop");
  run_cmd->add_option("scenarios", run.scenarios, "Scenario files or directories")->required();
  run_cmd->add_option("--mode", run_mode, "Override agent mode: nr | r")->check(CLI::IsMember({"nr", "r"}));
  run_cmd->add_option("--predictor", run.predictor, "cv | ego-cond | file:<path>");
  run_cmd->add_option("--proposals", run.proposals, "sampler | file:<path>");
  run_cmd->add_option("--config", run.config, "Config file with planner/proposals/occupancy/ego_params/idm");
  run_cmd->add_option("--seed", run.seed, "Random seed");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--frames", run.frames, "Write frames.jsonl per scenario");
  run_cmd->add_option("--rollout-log", run.rollout_log, "Write one JSON line per rollout");

  DumpOptions dump;
  int dump_mode = -1;
  auto * dump_cmd = app.add_subcommand("dump-grids", "Write input, occupancy, deviation and cost grids");
  dump_cmd->add_option("scenario", dump.scenario, "Scenario file")->required();
  dump_cmd->add_option("--tick", dump.tick, "Tick to dump");
  dump_cmd->add_option("--select", dump_mode, "Proposal mode to dump (default: planner choice)");
  dump_cmd->add_option("--predictor", dump.predictor, "cv | ego-cond | file:<path>");
  dump_cmd->add_option("--proposals", dump.proposals, "sampler | file:<path>");
  dump_cmd->add_option("--config", dump.config, "Config file");
  dump_cmd->add_option("--seed", dump.seed, "Random seed");
  dump_cmd->add_option("--out", dump.out, "Output directory");

  BenchOptions bench;
  auto * bench_cmd = app.add_subcommand("bench", "Time the planning pipeline for 1, 2 and 3 modes");
  bench_cmd->add_option("--config", bench.config, "Config file");
  bench_cmd->add_option("--repetitions,-n", bench.repetitions, "Repetitions per mode count")
    ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Random seed");

  std::vector<std::string> validate_paths;
  auto * validate_cmd = app.add_subcommand("validate", "Schema-check scenario, map, proposal or config files");
  validate_cmd->add_option("files", validate_paths, "Files to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (run_cmd->parsed()) {
    if (!run_mode.empty()) {
      run.mode = run_mode;
    }
    return cmd_run(run, std::cout, std::cerr);
  }
  if (dump_cmd->parsed()) {
    if (dump_mode >= 0) {
      dump.mode = dump_mode;
    }
    return cmd_dump_grids(dump, std::cout, std::cerr);
  }
  if (bench_cmd->parsed()) {
    return cmd_bench(bench, std::cout, std::cerr);
  }
  return cmd_validate(validate_paths, std::cout, std::cerr);
}

}  // namespace pgmcts::cli
