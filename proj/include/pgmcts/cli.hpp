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

#ifndef PGMCTS__CLI_HPP_
#define PGMCTS__CLI_HPP_

#include "pgmcts/simulation.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pgmcts::cli
{

inline constexpr std::uint64_t kDefaultSeed = 7;

struct RunOptions
{
  std::vector<std::string> scenarios;  // files, or directories of *.json
  std::optional<std::string> mode;     // "nr" | "r"
  std::string predictor = "ego-cond";
  std::string proposals = "sampler";
  std::string config;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "out";
  bool frames = false;
  std::string rollout_log;
};

struct DumpOptions
{
  std::string scenario;
  int tick = 0;
  std::optional<int> mode;  // proposal to dump; defaults to the planner's pick
  std::string predictor = "ego-cond";
  std::string proposals = "sampler";
  std::string config;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "grids";
};

struct BenchOptions
{
  std::string config;
  int repetitions = 5;
  std::uint64_t seed = kDefaultSeed;
};

/// Exit codes: 0 success, 2 on any scenario or input error.
int cmd_run(const RunOptions & opts, std::ostream & out, std::ostream & err);
int cmd_dump_grids(const DumpOptions & opts, std::ostream & out, std::ostream & err);
int cmd_bench(const BenchOptions & opts, std::ostream & out, std::ostream & err);
/// Each path is checked as a scenario, map, proposal or config file by its
/// top-level keys.
int cmd_validate(const std::vector<std::string> & paths, std::ostream & out, std::ostream & err);

/// Serialized outputs of one run; metrics exclude wall-clock values.
std::string metrics_json(const SimResult & result, std::uint64_t seed, const std::string & predictor);
std::string timing_json(const SimResult & result);
std::string frames_jsonl(const Scenario & scn, const SimResult & result);

/// Parses argv and dispatches to a command.
int main_entry(int argc, char ** argv);

}  // namespace pgmcts::cli

#endif  // PGMCTS__CLI_HPP_
