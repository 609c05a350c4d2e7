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

#include "pgmcts/bench.hpp"

#include "pgmcts/error.hpp"
#include "pgmcts/input_layers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pgmcts
{

namespace
{

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

Scenario make_dense_scenario()
{
  Scenario scn;
  scn.id = "bench_dense";
  scn.duration = 1.0;
  std::vector<Lane> lanes;
  const double ys[3] = {-3.5, 0.0, 3.5};
  for (int i = 0; i < 3; ++i) {
    Lane l;
    l.id = i + 1;
    l.centerline = {Vec2(-60.0, ys[i]), Vec2(240.0, ys[i])};
    l.speed_limit = 13.9;
    if (i > 0) {
      l.right = i;
    }
    if (i < 2) {
      l.left = i + 2;
    }
    lanes.push_back(std::move(l));
  }
  scn.lanes = LaneGraph(std::move(lanes));
  scn.drivable = make_drivable_area({{Vec2(-60.0, -5.25), Vec2(240.0, -5.25), Vec2(240.0, 5.25), Vec2(-60.0, 5.25)}});
  scn.ego.v = 10.0;
  scn.route_start = 2;
  scn.route_goal = 2;
  scn.route = extract_route(scn.lanes, 2, 2);
  struct Spec
  {
    double x;
    double lane_y;
    double v;
  };
  const Spec specs[] = {{22.0, 0.0, 7.0}, {-14.0, 0.0, 11.0}, {6.0, 3.5, 9.0}, {30.0, 3.5, 10.0},
    {-8.0, 3.5, 12.0}, {12.0, -3.5, 8.0}, {38.0, -3.5, 6.0}, {-20.0, -3.5, 11.0}};
  const int ticks = scn.ticks();
  int n = 0;
  for (const Spec & s : specs) {
    ScenarioAgent a;
    a.id = "veh" + std::to_string(n++);
    a.speed = s.v;
    a.lane = s.lane_y > 1.0 ? 3 : (s.lane_y < -1.0 ? 1 : 2);
    for (int k = 0; k <= ticks; ++k) {
      a.log.push_back({s.x + s.v * k * scn.dt, s.lane_y, 0.0});
    }
    scn.agents.push_back(std::move(a));
  }
  return scn;
}

BenchReport run_bench(const ConfigFile & config, int repetitions, std::uint64_t seed)
{
  if (repetitions < 1) {
    throw Error(ErrorKind::FormatError, "bench needs at least one repetition");
  }
  const Scenario scn = make_dense_scenario();
  Trajectory executed;
  executed.states.push_back(scn.ego);
  std::vector<std::vector<Pose2>> poses{{}};
  for (const ScenarioAgent & a : scn.agents) {
    poses[0].push_back(a.log.front());
  }
  const std::vector<AgentTrack> tracks = agent_history(scn, poses, 0);
  const std::vector<VehicleState> ego_hist = ego_history(executed, 0);
  GridSpec spec;
  spec.origin = scn.ego.pose();
  const auto predictor = make_predictor("ego-cond", config.occupancy);

  BenchReport report;
  report.repetitions = repetitions;
  for (int modes = 1; modes <= 3; ++modes) {
    ProposalParams pp = config.proposals;
    pp.count = modes;
    PlannerConfig pc = config.planner;
    pc.parallel_modes = false;
    pc.check_invariants = false;
    pc.log_rollouts = false;
    std::vector<double> t_prop;
    std::vector<double> t_occ;
    std::vector<double> t_rast;
    std::vector<double> t_plan;
    std::vector<double> t_total;
    BenchRow row;
    row.modes = modes;
    for (int rep = 0; rep < repetitions; ++rep) {
      const auto t0 = Clock::now();
      auto t = Clock::now();
      const ProposalSet set = sample_centerline_proposals(scn.ego, scn.route, scn.ego_params, modes, pp, &scn.lanes);
      const double a = seconds_since(t);

      t = Clock::now();
      std::vector<OccupancySequence> occ;
      for (int m = 0; m < modes; ++m) {
        occ.push_back(predictor->predict(tracks, set.modes[static_cast<std::size_t>(m)], scn.ego_params, spec, {0, m}));
      }
      const double b = seconds_since(t);

      t = Clock::now();
      std::vector<DeviationMaps> dev;
      for (int m = 0; m < modes; ++m) {
        const InputLayers layers = build_input_layers(
          ego_hist, tracks, scn.lanes, scn.drivable, set.modes[static_cast<std::size_t>(m)], scn.ego_params, spec);
        (void)layers;
        dev.push_back(build_deviation_maps(set.modes[static_cast<std::size_t>(m)], scn.ego_params, spec, pp.d_max));
      }
      const double c = seconds_since(t);

      t = Clock::now();
      pc.seed = derive_seed(seed, static_cast<std::uint64_t>(rep));
      const PlanResult r = plan(scn.ego, set, occ, dev, scn.ego_params, pc);
      (void)r;
      const double d = seconds_since(t);
      const double total = seconds_since(t0);

      t_prop.push_back(a);
      t_occ.push_back(b);
      t_rast.push_back(c);
      t_plan.push_back(d);
      t_total.push_back(total);
      row.accounting_error = std::max(row.accounting_error, std::abs(a + b + c + d - total) / total);
    }
    row.proposals = median(t_prop);
    row.occupancy = median(t_occ);
    row.rasterization = median(t_rast);
    row.planning = median(t_plan);
    row.total = median(t_total);
    report.rows.push_back(row);
  }
  return report;
}

std::string format_bench(const BenchReport & report)
{
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %10s %10s %10s\n", "Module (median s)", "1 mode", "2 modes", "3 modes");
  out << line;
  auto emit = [&](const char * name, double BenchRow::*field) {
    std::snprintf(line, sizeof(line), "%-24s", name);
    out << line;
    for (const BenchRow & r : report.rows) {
      std::snprintf(line, sizeof(line), " %10.4f", r.*field);
      out << line;
    }
    out << "\n";
  };
  emit("Proposal generation", &BenchRow::proposals);
  emit("Occupancy prediction", &BenchRow::occupancy);
  emit("Rasterization", &BenchRow::rasterization);
  emit("MCTS planning", &BenchRow::planning);
  emit("Total", &BenchRow::total);
  out << "repetitions: " << report.repetitions << "\n";
  return out.str();
}

}  // namespace pgmcts
