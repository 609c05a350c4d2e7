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

#include "pgmcts/planner.hpp"

#include "pgmcts/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace pgmcts
{

void validate(const PlannerConfig & c)
{
  const bool ok = c.iterations >= 1 && c.exploration >= 0.0 && c.widening_k > 0.0 && c.widening_gamma > 0.0 &&
                  c.macro_ticks >= 1 && c.accel_perturbation >= 0.0 && c.steer_perturbation >= 0.0 &&
                  c.noise_accel >= 0.0 && c.noise_steer >= 0.0 && c.alpha >= 0.0 && c.beta >= 0.0 &&
                  c.steps >= 1 && c.dt > 0.0 && (!c.out_of_grid_penalty || *c.out_of_grid_penalty >= 0.0);
  if (!ok) {
    throw Error(ErrorKind::FormatError, "invalid planner configuration");
  }
}

Control candidate_offset(int index, const PlannerConfig & config)
{
  if (index < 0 || index >= kCandidateCount) {
    throw Error(ErrorKind::Exhausted, "candidate index " + std::to_string(index) + " out of range");
  }
  if (index == 0) {
    return {};
  }
  // Row-major cells of the 3x3 grid with the center removed.
  const int cell = index <= 4 ? index - 1 : index;
  const int ia = cell / 3 - 1;
  const int is = cell % 3 - 1;
  return {ia * config.accel_perturbation, is * config.steer_perturbation};
}

SearchTree::SearchTree(const VehicleState & root)
{
  SearchNode n;
  n.state = root;
  n.incoming = applied_control(root);
  nodes.push_back(std::move(n));
}

std::vector<VehicleState> SearchTree::path_states(int node) const
{
  std::vector<int> chain;
  for (int i = node; i > 0; i = (*this)[i].parent) {
    chain.push_back(i);
  }
  std::vector<VehicleState> out;
  out.push_back(nodes.front().state);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const auto & seg = (*this)[*it].segment;
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

int allowed_children(int visits, double k, double gamma)
{
  if (visits <= 0) {
    return 0;
  }
  const int n = static_cast<int>(std::floor(k * std::pow(static_cast<double>(visits), gamma)));
  return std::max(1, n);
}

int ucb_select(const SearchTree & tree, int parent, double exploration)
{
  const SearchNode & p = tree[parent];
  if (p.children.empty()) {
    throw Error(ErrorKind::NoChildren, "node " + std::to_string(parent) + " has no children");
  }
  const double log_n = std::log(static_cast<double>(std::max(1, p.visits)));
  int best = p.children.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c : p.children) {
    const SearchNode & n = tree[c];
    const double v = static_cast<double>(n.visits);
    const double score = n.q / v + exploration * std::sqrt(log_n / v);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

int expand(
  SearchTree & tree, int node, std::span<const Control> reference, const VehicleParams & params,
  const PlannerConfig & config)
{
  SearchNode & parent = tree[node];
  if (parent.tried >= kCandidateCount) {
    throw Error(ErrorKind::Exhausted, "all perturbation candidates of node " + std::to_string(node) + " used");
  }
  const Control offset = candidate_offset(parent.tried, config);
  ++parent.tried;

  SearchNode child;
  child.parent = node;
  child.depth = parent.depth + 1;
  child.offset = offset;
  const int t0 = parent.depth * config.macro_ticks;
  const int t1 = std::min(config.steps, t0 + config.macro_ticks);
  VehicleState s = parent.state;
  Control prev = parent.incoming;
  child.segment.reserve(static_cast<std::size_t>(std::max(0, t1 - t0)));
  for (int t = t0; t < t1; ++t) {
    const Control & ref = reference[static_cast<std::size_t>(t)];
    const Control u = clip_control({ref.accel + offset.accel, ref.steer + offset.steer}, prev, params, config.dt);
    s = bicycle_step(s, u, config.dt, params.wheelbase);
    child.segment.push_back(s);
    prev = u;
  }
  child.state = s;
  child.incoming = prev;
  const int index = static_cast<int>(tree.size());
  tree.nodes.push_back(std::move(child));
  tree[node].children.push_back(index);
  return index;
}

std::vector<double> cost_profile(
  const Trajectory & traj, const OccupancySequence & occ, const DeviationMaps & dev,
  const VehicleParams & params, double alpha, double beta, std::optional<double> out_of_grid_penalty)
{
  const std::size_t steps = occ.size();
  if (dev.size() != steps || traj.size() < steps + 1) {
    throw Error(
      ErrorKind::LengthMismatch, "trajectory (" + std::to_string(traj.size()) + " states), occupancy (" +
                                   std::to_string(steps) + ") and deviation maps (" + std::to_string(dev.size()) +
                                   ") are not aligned");
  }
  const double penalty = out_of_grid_penalty.value_or(alpha);
  std::vector<double> out(steps, 0.0);
  Footprint fp;
  for (std::size_t i = 0; i < steps; ++i) {
    const Grid & o = occ.grids[i];
    const Grid & d = dev.maps[i];
    rasterize_footprint_spans(body_center(traj[i + 1], params), params.dims(), o.spec, fp);
    if (!fp.fully_inside(o.spec)) {
      out[i] = penalty * static_cast<double>(fp.cell_count());
      continue;
    }
    const int cols = o.spec.cols;
    double sum_o = 0.0;
    double sum_d = 0.0;
    for (const RowSpan & s : fp.spans) {
      const float * orow = o.values.data() + static_cast<std::ptrdiff_t>(s.row) * cols;
      const float * drow = d.values.data() + static_cast<std::ptrdiff_t>(s.row) * cols;
      for (int c = s.col_begin; c < s.col_end; ++c) {
        sum_o += orow[c];
        sum_d += drow[c];
      }
    }
    out[i] = alpha * sum_o + beta * sum_d;
  }
  return out;
}

double cost_of_trajectory(
  const Trajectory & traj, const OccupancySequence & occ, const DeviationMaps & dev,
  const VehicleParams & params, double alpha, double beta, std::optional<double> out_of_grid_penalty)
{
  const std::vector<double> profile = cost_profile(traj, occ, dev, params, alpha, beta, out_of_grid_penalty);
  return profile.empty() ? 0.0 : *std::max_element(profile.begin(), profile.end());
}

Rollout simulate_rollout(
  const SearchTree & tree, int leaf, std::span<const Control> reference, const OccupancySequence & occ,
  const DeviationMaps & dev, const VehicleParams & params, const PlannerConfig & config, std::mt19937_64 & rng)
{
  Rollout r;
  r.trajectory.dt = config.dt;
  r.trajectory.states = tree.path_states(leaf);
  r.trajectory.states.reserve(static_cast<std::size_t>(config.steps) + 1);
  std::normal_distribution<double> unit(0.0, 1.0);
  VehicleState s = r.trajectory.states.back();
  Control prev = tree[leaf].incoming;
  for (int t = static_cast<int>(r.trajectory.states.size()) - 1; t < config.steps; ++t) {
    const Control & ref = reference[static_cast<std::size_t>(t)];
    const double na = unit(rng) * config.noise_accel;
    const double ns = unit(rng) * config.noise_steer;
    const Control u = clip_control({ref.accel + na, ref.steer + ns}, prev, params, config.dt);
    s = bicycle_step(s, u, config.dt, params.wheelbase);
    r.trajectory.states.push_back(s);
    prev = u;
  }
  r.cost = cost_of_trajectory(r.trajectory, occ, dev, params, config.alpha, config.beta, config.out_of_grid_penalty);
  return r;
}

void backpropagate(SearchTree & tree, int leaf, double reward)
{
  if (!std::isfinite(reward)) {
    throw Error(ErrorKind::InvariantViolation, "non-finite reward");
  }
  for (int i = leaf; i >= 0; i = tree[i].parent) {
    tree[i].visits += 1;
    tree[i].q += reward;
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace
{

void check_widening(const SearchTree & tree, const PlannerConfig & config)
{
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const SearchNode & n = tree.nodes[i];
    const int bound = std::max(1, allowed_children(n.visits, config.widening_k, config.widening_gamma));
    if (static_cast<int>(n.children.size()) > bound) {
      throw Error(
        ErrorKind::InvariantViolation, "node " + std::to_string(i) + " has " + std::to_string(n.children.size()) +
                                         " children with " + std::to_string(n.visits) + " visits");
    }
  }
}

struct TreeOutcome
{
  Rollout best;
  ModeStats stats;
  std::vector<RolloutRecord> log;
};

TreeOutcome search_tree(
  int mode, const VehicleState & state, const Trajectory & proposal, const OccupancySequence & occ,
  const DeviationMaps & dev, const VehicleParams & params, const PlannerConfig & config)
{
  const std::vector<Control> reference = reference_controls(proposal);
  if (static_cast<int>(reference.size()) < config.steps) {
    throw Error(ErrorKind::LengthMismatch, "proposal " + std::to_string(mode) + " is shorter than the horizon");
  }
  std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(mode)));
  SearchTree tree(state);
  tree.nodes.reserve(static_cast<std::size_t>(config.iterations) + 1);
  TreeOutcome out;
  out.best.cost = std::numeric_limits<double>::infinity();
  const int max_depth = config.max_depth();
  for (int it = 0; it < config.iterations; ++it) {
    int node = 0;
    for (;;) {
      const SearchNode & n = tree[node];
      if (n.depth >= max_depth) {
        break;
      }
      const int allowed = allowed_children(n.visits, config.widening_k, config.widening_gamma);
      if (static_cast<int>(n.children.size()) < allowed && n.tried < kCandidateCount) {
        node = expand(tree, node, reference, params, config);
        break;
      }
      if (n.children.empty()) {
        break;
      }
      node = ucb_select(tree, node, config.exploration);
    }
    if (config.check_invariants) {
      check_widening(tree, config);
    }
    Rollout r = simulate_rollout(tree, node, reference, occ, dev, params, config, rng);
    if (config.log_rollouts) {
      out.log.push_back({mode, it, tree[node].depth, r.cost});
    }
    backpropagate(tree, node, -r.cost);
    if (r.cost < out.best.cost) {
      out.best = std::move(r);
    }
  }
  if (config.check_invariants) {
    check_widening(tree, config);
  }
  out.stats.iterations = config.iterations;
  out.stats.best_cost = out.best.cost;
  out.stats.tree_size = tree.size();
  out.stats.root_visits = tree[0].visits;
  return out;
}

}  // namespace

PlanResult plan(
  const VehicleState & state, const ProposalSet & proposals, std::span<const OccupancySequence> occ_per_mode,
  std::span<const DeviationMaps> dev_per_mode, const VehicleParams & params, const PlannerConfig & config)
{
  validate(config);
  const std::size_t k = proposals.size();
  if (k == 0 || occ_per_mode.size() != k || dev_per_mode.size() != k || proposals.scores.size() != k) {
    throw Error(
      ErrorKind::LengthMismatch, std::to_string(k) + " proposals with " + std::to_string(occ_per_mode.size()) +
                                   " occupancy sequences and " + std::to_string(dev_per_mode.size()) +
                                   " deviation map sets");
  }
  std::vector<TreeOutcome> outcomes(k);
  auto run = [&](std::size_t m) {
    outcomes[m] = search_tree(
      static_cast<int>(m), state, proposals.modes[m], occ_per_mode[m], dev_per_mode[m], params, config);
  };
  if (config.parallel_modes && k > 1) {
    std::vector<std::exception_ptr> errors(k);
    std::vector<std::thread> workers;
    for (std::size_t m = 0; m < k; ++m) {
      workers.emplace_back([&, m] {
        try {
          run(m);
        } catch (...) {
          errors[m] = std::current_exception();
        }
      });
    }
    for (auto & w : workers) {
      w.join();
    }
    for (const auto & e : errors) {
      if (e) {
        std::rethrow_exception(e);
      }
    }
  } else {
    for (std::size_t m = 0; m < k; ++m) {
      run(m);
    }
  }

  PlanResult result;
  std::size_t winner = 0;
  for (std::size_t m = 1; m < k; ++m) {
    const double c = outcomes[m].best.cost;
    const double w = outcomes[winner].best.cost;
    if (c < w || (c == w && proposals.scores[m] > proposals.scores[winner])) {
      winner = m;
    }
  }
  result.mode = static_cast<int>(winner);
  result.cost = outcomes[winner].best.cost;
  result.trajectory = outcomes[winner].best.trajectory;
  for (auto & o : outcomes) {
    result.stats.push_back(o.stats);
    result.rollouts.insert(result.rollouts.end(), o.log.begin(), o.log.end());
  }
  return result;
}

}  // namespace pgmcts
