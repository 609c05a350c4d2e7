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

#ifndef PGMCTS__BENCH_HPP_
#define PGMCTS__BENCH_HPP_

#include "pgmcts/config.hpp"
#include "pgmcts/simulation.hpp"

#include <string>
#include <vector>

namespace pgmcts
{

/// Median seconds per planning tick for one mode count.
struct BenchRow
{
  int modes = 0;
  double proposals = 0.0;
  double occupancy = 0.0;
  double rasterization = 0.0;  // input layers and deviation maps
  double planning = 0.0;
  double total = 0.0;
  double accounting_error = 0.0;  // worst |sum of modules - total| / total over repetitions
};

struct BenchReport
{
  int repetitions = 0;
  std::vector<BenchRow> rows;
};

/// Three-lane road with eight surrounding vehicles.
Scenario make_dense_scenario();

/// Times one full planning tick of the dense scenario for 1, 2 and 3 modes.
/// Runs single-threaded.
BenchReport run_bench(const ConfigFile & config, int repetitions, std::uint64_t seed = 0);

std::string format_bench(const BenchReport & report);

}  // namespace pgmcts

#endif  // PGMCTS__BENCH_HPP_
