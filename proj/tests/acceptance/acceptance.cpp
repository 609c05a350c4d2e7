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

// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [criterion ...]    run all criteria, or only the listed ones

#include "pgmcts/bench.hpp"
#include "pgmcts/cli.hpp"
#include "pgmcts/scenario_io.hpp"
#include "pgmcts/simulation.hpp"
#include "support/oracles.hpp"

#include <Eigen/QR>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace
{

using namespace pgmcts;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kUcbTol = 1e-9;
constexpr double kUcbSeconds = 1.0;
constexpr double kCostTol = 1e-6;
constexpr double kCostSeconds = 10.0;
constexpr double kCircleRelTol = 0.01;
constexpr double kMinCentroidLagCells = 2.0;
constexpr int kSuiteSeeds = 50;
constexpr double kMaxOffroad = 0.05;
constexpr double kMinMeanProgress = 0.7;
constexpr double kSuiteMinutes = 30.0;
constexpr double kPlan3Seconds = 0.5;
constexpr double kTotal3Seconds = 0.8;
constexpr double kPlan1Seconds = 0.15;
constexpr double kBenchAccounting = 0.10;
constexpr int kBenchRepetitions = 7;

const std::string kData = PGMCTS_DATA_DIR;
const std::vector<std::string> kScenarios = {"empty_road", "stopped_lead", "crossing", "merge"};

struct Outcome
{
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Scenario scenario(const std::string & name) { return load_scenario(kData + "/scenarios/" + name + ".json"); }

// --------------------------------------------------------------- criterion 1

Outcome ucb_fidelity()
{
  const auto t0 = Clock::now();
  oracle::Gen gen(101);
  double worst = 0.0;
  int wrong_pick = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    SearchTree tree(VehicleState{});
    const int k = gen.integer(1, 9);
    int total = 0;
    for (int i = 0; i < k; ++i) {
      SearchNode n;
      n.visits = gen.integer(1, 60);
      n.q = gen.uniform(-400.0, 0.0) * n.visits / 60.0;
      n.parent = 0;
      total += n.visits;
      tree.nodes.push_back(n);
      tree[0].children.push_back(static_cast<int>(tree.size()) - 1);
    }
    tree[0].visits = total + gen.integer(0, 3);
    const double c = gen.uniform(0.0, 3.0);
    double best = -1e300;
    for (int ch : tree[0].children) {
      best = std::max(best, oracle::ucb_score(tree[ch].q, tree[ch].visits, tree[0].visits, c));
    }
    const int got = ucb_select(tree, 0, c);
    const double diff = std::abs(oracle::ucb_score(tree[got].q, tree[got].visits, tree[0].visits, c) - best);
    worst = std::max(worst, diff);
    wrong_pick += diff > kUcbTol ? 1 : 0;
  }
  // Worked example: (Q=5, V=5) vs (Q=1, V=1) under a parent with V=6.
  SearchTree ex(VehicleState{});
  ex[0].visits = 6;
  for (const auto & [q, v] : std::vector<std::pair<double, int>>{{5.0, 5}, {1.0, 1}}) {
    SearchNode n;
    n.q = q;
    n.visits = v;
    n.parent = 0;
    ex.nodes.push_back(n);
    ex[0].children.push_back(static_cast<int>(ex.size()) - 1);
  }
  const double s1 = oracle::ucb_score(5, 5, 6, std::sqrt(2.0));
  const double s2 = oracle::ucb_score(1, 1, 6, std::sqrt(2.0));
  const bool example = std::abs(s1 - 1.8466) < 5e-4 && std::abs(s2 - 2.893) < 5e-4 && ucb_select(ex, 0, std::sqrt(2.0)) == 2;
  const double secs = seconds_since(t0);
  return {wrong_pick == 0 && example && secs < kUcbSeconds,
    "1000 trees, worst |diff| " + fmt("%.2e", worst) + ", example " + fmt("%.3f", s1) + " vs " + fmt("%.3f", s2) +
      (example ? " ok" : " WRONG") + ", " + fmt("%.3f", secs) + " s"};
}

// --------------------------------------------------------------- criterion 2

Outcome widening_bound()
{
  int runs = 0;
  int violations = 0;
  std::string first_error;
  for (const std::string & name : kScenarios) {
    for (SimMode mode : {SimMode::NonReactive, SimMode::Reactive}) {
      SimConfig cfg;
      cfg.seed = 17;
      cfg.mode_override = mode;
      cfg.planner.check_invariants = true;
      const SimResult r = run_closed_loop(scenario(name), cfg);
      ++runs;
      if (r.aborted) {
        ++violations;
        if (first_error.empty()) {
          first_error = r.error;
        }
      }
    }
  }
  return {violations == 0, std::to_string(runs) + " instrumented closed-loop runs, " + std::to_string(violations) +
                             " aborted" + (first_error.empty() ? "" : " (" + first_error + ")")};
}

// --------------------------------------------------------------- criterion 3

Outcome cost_oracle()
{
  const auto t0 = Clock::now();
  oracle::Gen gen(303);
  const VehicleParams p;
  double worst = 0.0;
  int off_grid = 0;
  for (int trial = 0; trial < 100; ++trial) {
    GridSpec spec;
    spec.rows = 64;
    spec.cols = 64;
    spec.origin = {gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-0.5, 0.5)};
    OccupancySequence occ;
    occ.spec = spec;
    DeviationMaps dev;
    for (int t = 0; t < 10; ++t) {
      Grid o(spec, GridSemantics::Probability);
      o.values = gen.unit_field(64, 64);
      occ.grids.push_back(o);
      Grid d(spec, GridSemantics::Distance);
      d.values = gen.unit_field(64, 64);
      dev.maps.push_back(d);
    }
    VehicleState s{gen.uniform(-3, 0), gen.uniform(-2, 2), gen.uniform(-0.6, 0.6), gen.uniform(0, 6), 0, 0};
    std::vector<Control> u;
    for (int i = 0; i < 10; ++i) {
      u.push_back({gen.uniform(-4, 3), gen.uniform(-0.5, 0.5)});
    }
    const Trajectory traj = rollout_controls(s, u, p);
    const double alpha = gen.uniform(0.1, 2.0);
    const double beta = gen.uniform(0.0, 1.0);
    const double fast = cost_of_trajectory(traj, occ, dev, p, alpha, beta);
    const double slow = oracle::naive_cost(traj, occ, dev, p, alpha, beta, alpha);
    worst = std::max(worst, std::abs(fast - slow));
    for (std::size_t k = 1; k < traj.size(); ++k) {
      if (!rasterize_footprint_spans(body_center(traj[k], p), p.dims(), spec).fully_inside(spec)) {
        ++off_grid;
        break;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kCostTol && secs < kCostSeconds,
    "100 instances (" + std::to_string(off_grid) + " leave the grid), worst |diff| " + fmt("%.2e", worst) + ", " +
      fmt("%.2f", secs) + " s"};
}

// --------------------------------------------------------------- criterion 4

Outcome distance_transform_oracle()
{
  oracle::Gen gen(404);
  int mismatched = 0;
  double worst_m = 0.0;
  GridSpec spec;
  spec.rows = 32;
  spec.cols = 32;
  for (int trial = 0; trial < 50; ++trial) {
    Grid g(spec, GridSemantics::Binary);
    g.values = gen.binary_field(32, 32, gen.uniform(0.002, 0.2));
    const GridArray<double> expected = oracle::brute_force_edt(g.values);
    GridArray<double> sq =
      (g.values > 0.0F).select(GridArray<double>::Zero(32, 32), std::numeric_limits<double>::infinity());
    detail::squared_edt(sq);
    if (!(sq == oracle::brute_force_sq_edt(g.values)).all()) {
      ++mismatched;
    }
    const Grid d = distance_transform(g);
    const GridArray<float> want = (expected * spec.resolution).cast<float>();
    worst_m = std::max(worst_m, static_cast<double>((d.values - want).abs().maxCoeff()));
  }
  return {mismatched == 0 && worst_m == 0.0,
    "50 grids, " + std::to_string(mismatched) + " squared-distance mismatches, worst metric diff " +
      fmt("%.1e", worst_m)};
}

// --------------------------------------------------------------- criterion 5

Outcome dynamics()
{
  // (a) straight line
  VehicleState s;
  s.v = 10.0;
  bool straight = true;
  for (int k = 0; k < 100; ++k) {
    const VehicleState n = bicycle_step(s, {0.0, 0.0}, 0.1, 3.0);
    straight = straight && n.y == s.y && n.theta == s.theta && n.v == s.v && std::abs(n.x - s.x - 1.0) < 1e-12;
    s = n;
  }
  const VehicleState one = bicycle_step(VehicleState{0, 0, 0, 10, 0, 0}, {0, 0}, 0.1, 3.0);
  straight = straight && one.x == 1.0 && one.y == 0.0 && one.theta == 0.0;

  // (b) circle radius by least squares on one revolution
  const double L = 3.0;
  const double delta = 0.1;
  const double expected = L / std::tan(delta);
  VehicleState c;
  c.v = 5.0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  const int steps = static_cast<int>(2.0 * M_PI * expected / (c.v * 0.01));
  a.resize(steps, 3);
  b.resize(steps);
  for (int i = 0; i < steps; ++i) {
    c = bicycle_step(c, {0.0, delta}, 0.01, L);
    a.row(i) << c.x, c.y, 1.0;
    b(i) = -(c.x * c.x + c.y * c.y);
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const double radius = std::sqrt(sol(0) * sol(0) / 4 + sol(1) * sol(1) / 4 - sol(2));
  const double rel = std::abs(radius - expected) / expected;

  // (c) jerk bound on noisy rollouts
  oracle::Gen gen(505);
  const VehicleParams p;
  double worst_jerk = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    VehicleState st;
    st.v = gen.uniform(0, 15);
    std::vector<Control> u;
    for (int i = 0; i < 30; ++i) {
      u.push_back({gen.uniform(-8, 8), gen.uniform(-1, 1)});
    }
    const Trajectory t = rollout_controls(st, u, p);
    for (std::size_t k = 1; k < t.size(); ++k) {
      worst_jerk = std::max(worst_jerk, std::abs(t[k].accel - t[k - 1].accel) / 0.1);
    }
  }
  const bool jerk = worst_jerk <= p.jerk_max + 1e-9;
  return {straight && rel < kCircleRelTol && jerk,
    std::string("straight ") + (straight ? "exact" : "BROKEN") + ", radius " + fmt("%.3f", radius) + " vs " +
      fmt("%.3f", expected) + " (" + fmt("%.3f", rel * 100) + "%), max jerk " + fmt("%.3f", worst_jerk) + " <= " +
      fmt("%.1f", p.jerk_max)};
}

// --------------------------------------------------------------- criterion 6

Outcome ego_conditioning()
{
  const Scenario scn = load_scenario(kData + "/fixtures/merge_conditioning.json");
  const ProposalSet set = sample_centerline_proposals(scn.ego, scn.route, scn.ego_params, 3, {}, &scn.lanes);
  std::vector<std::vector<Pose2>> poses{{}};
  for (const ScenarioAgent & a : scn.agents) {
    poses[0].push_back(a.log.front());
  }
  const std::vector<AgentTrack> tracks = agent_history(scn, poses, 0);
  GridSpec spec;
  spec.origin = scn.ego.pose();
  const OccupancySequence cv = predict_constant_velocity(tracks, spec);
  // Mode 0 accelerates (aggressive), mode 2 brakes (conservative).
  const OccupancySequence aggressive = predict_ego_conditioned_yield(tracks, set.modes[0], scn.ego_params, spec);
  const OccupancySequence conservative = predict_ego_conditioned_yield(tracks, set.modes[2], scn.ego_params, spec);
  auto l1 = [](const OccupancySequence & x, const OccupancySequence & y) {
    double total = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      total += (x.grids[t].values - y.grids[t].values).abs().cast<double>().sum();
    }
    return total;
  };
  const double l1_cv = l1(aggressive, cv);
  const double l1_modes = l1(aggressive, conservative);
  // Grid index 19 is t = 2.0 s; the agent travels along +row.
  const double lag = oracle::centroid(cv.grids[19]).x() - oracle::centroid(aggressive.grids[19]).x();
  return {l1_cv > 0.0 && l1_modes > 0.0 && lag >= kMinCentroidLagCells,
    "L1 vs unconditioned " + fmt("%.1f", l1_cv) + ", aggressive vs conservative " + fmt("%.1f", l1_modes) +
      ", centroid lag at 2 s " + fmt("%.2f", lag) + " cells (>= " + fmt("%.0f", kMinCentroidLagCells) + ")"};
}

// --------------------------------------------------------------- criterion 7

Outcome safety_suite()
{
  struct Job
  {
    std::string name;
    SimMode mode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::string & name : kScenarios) {
    for (SimMode mode : {SimMode::NonReactive, SimMode::Reactive}) {
      for (int seed = 0; seed < kSuiteSeeds; ++seed) {
        jobs.push_back({name, mode, static_cast<std::uint64_t>(seed)});
      }
    }
  }
  std::map<std::string, Scenario> scenarios;
  for (const std::string & name : kScenarios) {
    scenarios[name] = scenario(name);
  }
  std::vector<Metrics> metrics(jobs.size());
  std::vector<std::string> errors(jobs.size());
  const auto t0 = Clock::now();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      SimConfig cfg;
      cfg.seed = jobs[i].seed;
      cfg.mode_override = jobs[i].mode;
      const SimResult r = run_closed_loop(scenarios.at(jobs[i].name), cfg);
      metrics[i] = r.metrics;
      if (r.aborted) {
        errors[i] = r.error;
      }
    }
  };
  const unsigned n_threads = std::max(1U, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto & t : pool) {
    t.join();
  }
  const double minutes = seconds_since(t0) / 60.0;

  int collisions = 0;
  int aborted = 0;
  double worst_offroad = 0.0;
  std::map<std::string, std::pair<double, int>> progress;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    collisions += metrics[i].collision ? 1 : 0;
    aborted += errors[i].empty() ? 0 : 1;
    worst_offroad = std::max(worst_offroad, metrics[i].offroad_fraction);
    auto & acc = progress[jobs[i].name + "/" + to_string(jobs[i].mode)];
    acc.first += metrics[i].progress_ratio;
    acc.second += 1;
  }
  double lowest_mean = 1.0;
  std::ostringstream means;
  for (const auto & [key, acc] : progress) {
    const double mean = acc.first / acc.second;
    lowest_mean = std::min(lowest_mean, mean);
    means << " " << key << "=" << fmt("%.3f", mean);
  }
  const bool pass = collisions == 0 && aborted == 0 && worst_offroad <= kMaxOffroad &&
                    lowest_mean >= kMinMeanProgress && minutes <= kSuiteMinutes;
  return {pass, std::to_string(jobs.size()) + " runs, " + std::to_string(collisions) + " collisions, " +
                  std::to_string(aborted) + " aborted, max off-road " + fmt("%.3f", worst_offroad) +
                  ", mean progress" + means.str() + ", " + fmt("%.1f", minutes) + " min"};
}

// --------------------------------------------------------------- criterion 8

Outcome performance()
{
  const BenchReport rep = run_bench(ConfigFile{}, kBenchRepetitions, 0);
  const BenchRow & one = rep.rows[0];
  const BenchRow & three = rep.rows[2];
  double accounting = 0.0;
  for (const BenchRow & r : rep.rows) {
    accounting = std::max(accounting, r.accounting_error);
  }
  const bool pass = three.planning <= kPlan3Seconds && three.total <= kTotal3Seconds && one.planning <= kPlan1Seconds &&
                    one.planning < three.planning && accounting <= kBenchAccounting;
  return {pass, "median planning 1 mode " + fmt("%.4f", one.planning) + " s, 3 modes " + fmt("%.4f", three.planning) +
                  " s, 3-mode total " + fmt("%.4f", three.total) + " s, accounting error " +
                  fmt("%.1f", accounting * 100) + "%"};
}

// --------------------------------------------------------------- criterion 9

bool same_tree(const fs::path & a, const fs::path & b, std::string & diff)
{
  std::set<std::string> names;
  for (const auto & e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) {
      names.insert(fs::relative(e.path(), a).string());
    }
  }
  for (const auto & e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) {
      names.insert(fs::relative(e.path(), b).string());
    }
  }
  for (const std::string & n : names) {
    // Wall-clock latencies live in timing.json and are excluded by design.
    if (fs::path(n).filename() == "timing.json") {
      continue;
    }
    if (!fs::exists(a / n) || !fs::exists(b / n) || read_text_file((a / n).string()) != read_text_file((b / n).string())) {
      diff = n;
      return false;
    }
  }
  return !names.empty();
}

Outcome determinism()
{
  const fs::path root = fs::temp_directory_path() / "pgmcts_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream sink;
  int files_checked = 0;
  std::string diff;
  bool ok = true;
  for (const char * mode : {"nr", "r"}) {
    for (int rep = 0; rep < 2; ++rep) {
      cli::RunOptions o;
      o.scenarios = {kData + "/scenarios"};
      o.mode = mode;
      o.seed = 23;
      o.frames = true;
      o.out = (root / (std::string("run_") + mode + "_" + std::to_string(rep))).string();
      ok = ok && cli::cmd_run(o, sink, sink) == 0;
    }
    ok = ok && same_tree(root / (std::string("run_") + mode + "_0"), root / (std::string("run_") + mode + "_1"), diff);
  }
  for (int rep = 0; rep < 2; ++rep) {
    cli::DumpOptions d;
    d.scenario = kData + "/scenarios/merge.json";
    d.tick = 12;
    d.seed = 23;
    d.out = (root / ("dump_" + std::to_string(rep))).string();
    ok = ok && cli::cmd_dump_grids(d, sink, sink) == 0;
  }
  ok = ok && same_tree(root / "dump_0", root / "dump_1", diff);
  for (const auto & e : fs::recursive_directory_iterator(root)) {
    files_checked += e.is_regular_file() ? 1 : 0;
  }
  return {ok, std::to_string(files_checked) + " files from repeated run and dump-grids commands" +
                (ok ? ", all metric/frame/grid outputs byte-identical" : ", first difference: " + diff)};
}

// -------------------------------------------------------------- criterion 10

Outcome metric_definitions()
{
  std::vector<std::string> failures;
  // Progress
  Lane l;
  l.id = 1;
  l.centerline = {{0, 0}, {100, 0}};
  const Route route = extract_route(LaneGraph({l}), 1, 1);
  auto line = [](double to) {
    Trajectory t;
    t.states.push_back({0, 0, 0, 0, 0, 0});
    t.states.push_back({to, 0, 0, 0, 0, 0});
    return t;
  };
  if (progress_ratio(line(40), line(40), route) != 1.0) {
    failures.push_back("progress equal");
  }
  if (progress_ratio(line(20), line(40), route) != 0.5) {
    failures.push_back("progress half");
  }
  if (progress_ratio(line(48), line(40), route) != 1.0) {
    failures.push_back("progress cap");
  }
  // Off-road
  const DrivableArea area = make_drivable_area({{{-1, -1}, {100, -1}, {100, 1}, {-1, 1}}});
  Trajectory t;
  for (int k = 0; k < 31; ++k) {
    t.states.push_back({static_cast<double>(k), (k == 3 || k == 11 || k == 29) ? 2.0 : 0.0, 0, 0, 0, 0});
  }
  if (offroad_fraction(t, area) != 3.0 / 31.0) {
    failures.push_back("off-road 3/31");
  }
  // Separating-axis threshold for unit squares with one rotated 45 degrees.
  const BoxDims unit{1.0, 1.0};
  const double threshold = (1.0 + std::sqrt(2.0)) / 2.0;
  int sat_cases = 0;
  for (double d : {1.19, 1.20, 1.207, threshold - 1e-9, threshold + 1e-9, 1.2072, 1.21, 1.5}) {
    const OrientedBox a{{0, 0, 0}, unit};
    const OrientedBox b{{d, 0, M_PI / 4}, unit};
    const bool expected = d <= threshold;
    ++sat_cases;
    if (boxes_intersect(a, b) != expected || oracle::boxes_overlap(a, b) != expected) {
      failures.push_back("SAT at " + fmt("%.10f", d));
    }
  }
  std::string detail = "progress equal/half/cap, off-road 3/31, " + std::to_string(sat_cases) +
                       " SAT cases around " + fmt("%.4f", threshold);
  for (const std::string & f : failures) {
    detail += "; failed: " + f;
  }
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char ** argv)
{
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
    {"UCB selection fidelity", ucb_fidelity},
    {"progressive widening bound", widening_bound},
    {"cost oracle equivalence", cost_oracle},
    {"distance transform oracle", distance_transform_oracle},
    {"bicycle dynamics", dynamics},
    {"ego-conditioning effect", ego_conditioning},
    {"desk-scale safety suite", safety_suite},
    {"performance budget", performance},
    {"determinism", determinism},
    {"metric definitions", metric_definitions},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    selected.insert(std::atoi(argv[i]));
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) {
      continue;
    }
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
