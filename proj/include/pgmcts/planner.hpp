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

#ifndef PGMCTS__PLANNER_HPP_
#define PGMCTS__PLANNER_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/occupancy.hpp"
#include "pgmcts/proposals.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace pgmcts
{

struct PlannerConfig
{
  int iterations = 200;  // per proposal
  double exploration = std::sqrt(2.0);
  double widening_k = 2.0;
  double widening_gamma = 0.5;
  int macro_ticks = 5;
  double accel_perturbation = 0.5;
  double steer_perturbation = 0.1;
  double noise_accel = 0.2;
  double noise_steer = 0.03;
  double alpha = 1.0;
  double beta = 0.1;
  std::optional<double> out_of_grid_penalty;  // per kernel cell; defaults to alpha
  std::uint64_t seed = 0;
  int steps = kFutureSteps;
  double dt = kTickSeconds;
  bool parallel_modes = false;
  bool check_invariants = false;
  bool log_rollouts = false;

  int max_depth() const { return (steps + macro_ticks - 1) / macro_ticks; }
};

/// Throws FormatError on non-positive counts or weights.
void validate(const PlannerConfig & config);

inline constexpr int kCandidateCount = 9;

/// Perturbation offsets, center first then row-major over
/// accel {-, 0, +} x steer {-, 0, +}.
Control candidate_offset(int index, const PlannerConfig & config);

struct SearchNode
{
  VehicleState state;
  Control incoming;       // last control applied on the edge into this node
  Control offset;         // perturbation around the proposal controls on that edge
  double q = 0.0;         // accumulated reward
  int visits = 0;
  int depth = 0;          // macro-steps from the root
  int parent = -1;
  int tried = 0;          // candidates consumed by expansion
  std::vector<int> children;
  std::vector<VehicleState> segment;  // states produced by the incoming edge
};

/// Arena of nodes; index 0 is the root.
struct SearchTree
{
  std::vector<SearchNode> nodes;

  explicit SearchTree(const VehicleState & root);
  const SearchNode & operator[](int i) const { return nodes[static_cast<std::size_t>(i)]; }
  SearchNode & operator[](int i) { return nodes[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes.size(); }

  /// Root state followed by every edge state down to `node`.
  std::vector<VehicleState> path_states(int node) const;
};

/// floor(k * V^gamma), at least one once the node has been visited.
int allowed_children(int visits, double k, double gamma);

/// UCB argmax over the children of `parent`; ties go to the lowest index.
/// Throws NoChildren.
int ucb_select(const SearchTree & tree, int parent, double exploration);

/// Adds the next untried candidate under `node`: the proposal's per-tick
/// reference controls plus the candidate offset, clipped each tick, for one
/// macro-step. Throws Exhausted when all candidates were used.
int expand(
  SearchTree & tree, int node, std::span<const Control> reference, const VehicleParams & params,
  const PlannerConfig & config);

/// Max over timesteps of the kernel-summed alpha * O + beta * D. A footprint
/// leaving the grid costs the out-of-grid penalty on every kernel cell.
/// Throws LengthMismatch.
double cost_of_trajectory(
  const Trajectory & traj, const OccupancySequence & occ, const DeviationMaps & dev,
  const VehicleParams & params, double alpha, double beta, std::optional<double> out_of_grid_penalty = {});

/// Per-timestep kernel sums; the cost is their maximum.
std::vector<double> cost_profile(
  const Trajectory & traj, const OccupancySequence & occ, const DeviationMaps & dev,
  const VehicleParams & params, double alpha, double beta, std::optional<double> out_of_grid_penalty = {});

struct Rollout
{
  Trajectory trajectory;
  double cost = 0.0;
};

/// Noisy continuation of the proposal controls from `leaf` to the horizon.
Rollout simulate_rollout(
  const SearchTree & tree, int leaf, std::span<const Control> reference, const OccupancySequence & occ,
  const DeviationMaps & dev, const VehicleParams & params, const PlannerConfig & config, std::mt19937_64 & rng);

/// Adds one visit and `reward` to every node from `leaf` up to the root.
void backpropagate(SearchTree & tree, int leaf, double reward);

struct RolloutRecord
{
  int mode = 0;
  int iteration = 0;
  int leaf_depth = 0;
  double cost = 0.0;
};

struct ModeStats
{
  int iterations = 0;
  double best_cost = 0.0;
  std::size_t tree_size = 0;
  int root_visits = 0;
};

struct PlanResult
{
  Trajectory trajectory;
  double cost = 0.0;
  int mode = 0;
  std::vector<ModeStats> stats;
  std::vector<RolloutRecord> rollouts;  // filled when config.log_rollouts
};

/// SplitMix64-based seed derivation; trees use derive_seed(seed, mode).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

/// One search tree per proposal mode; returns the lowest-cost rollout across
/// all trees (ties: higher score, then lower mode index).
PlanResult plan(
  const VehicleState & state, const ProposalSet & proposals, std::span<const OccupancySequence> occ_per_mode,
  std::span<const DeviationMaps> dev_per_mode, const VehicleParams & params, const PlannerConfig & config);

}  // namespace pgmcts

#endif  // PGMCTS__PLANNER_HPP_
