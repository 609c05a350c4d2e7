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

#ifndef PGMCTS__OCCUPANCY_HPP_
#define PGMCTS__OCCUPANCY_HPP_

#include "pgmcts/dynamics.hpp"
#include "pgmcts/map_geometry.hpp"
#include "pgmcts/raster.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pgmcts
{

/// Observed history of one non-ego agent. Poses are box centers at 10 Hz,
/// oldest first; the last pose is the current one.
struct AgentTrack
{
  std::string id;
  BoxDims dims;
  std::vector<Pose2> poses;
  double speed = 0.0;
  std::optional<LaneId> lane;
};

/// Future occupancy of non-ego agents; grids[i] is at time (i + 1) * dt.
struct OccupancySequence
{
  std::vector<Grid> grids;
  GridSpec spec;
  double horizon = kFutureSteps * kTickSeconds;

  std::size_t size() const { return grids.size(); }
};

struct OccupancyParams
{
  int steps = kFutureSteps;
  double dt = kTickSeconds;
  double sigma0_cells = 0.5;
  double sigma_rate_cells = 1.0;  // per second
  double conflict_window = 0.5;   // seconds
  double reaction_lead = 0.3;     // seconds
  double yield_decel = -3.0;      // m/s^2

  double sigma_at(int step) const { return sigma0_cells + sigma_rate_cells * (step + 1) * dt; }
};

/// Straight-line extrapolation of one agent; poses[i] is at time (i + 1) * dt.
struct AgentForecast
{
  std::vector<Pose2> poses;
  std::vector<double> travel;  // distance along the motion direction
  bool yielding = false;
  std::optional<int> conflict_step;  // agent step of the first conflict, if any
};

/// Constant-velocity forecast from the last two history poses (static with
/// fewer than two).
AgentForecast forecast_constant_velocity(const AgentTrack & agent, const OccupancyParams & params);

/// Forecast of an agent that brakes for the ego proposal when the ego reaches
/// the first conflict cells strictly earlier; otherwise the constant-velocity
/// forecast.
AgentForecast forecast_yielding(
  const AgentTrack & agent, const Trajectory & ego_proposal, const VehicleParams & ego,
  const GridSpec & spec, const OccupancyParams & params);

/// Rasterizes forecasts with time-growing Gaussian blur, max-composited.
void render_forecasts(
  const std::vector<AgentTrack> & agents, const std::vector<AgentForecast> & forecasts,
  const GridSpec & spec, const OccupancyParams & params, OccupancySequence & out);

OccupancySequence predict_constant_velocity(
  const std::vector<AgentTrack> & agents, const GridSpec & spec, const OccupancyParams & params = {});

/// Throws LengthMismatch unless the proposal has params.steps + 1 states.
OccupancySequence predict_ego_conditioned_yield(
  const std::vector<AgentTrack> & agents, const Trajectory & ego_proposal, const VehicleParams & ego,
  const GridSpec & spec, const OccupancyParams & params = {});

/// Values are clamped to [0, 1]; each clamp is reported once per file through
/// `warnings` (or stderr when null). Throws FormatError, SpecMismatch.
OccupancySequence load_occupancy(
  const std::string & path, const GridSpec & spec, int steps = kFutureSteps,
  std::vector<std::string> * warnings = nullptr);

void save_occupancy(const std::string & path, const OccupancySequence & seq);

/// Which tick and proposal mode a prediction is requested for.
struct PredictionContext
{
  int tick = 0;
  int mode = 0;
};

class OccupancyPredictor
{
public:
  virtual ~OccupancyPredictor() = default;
  virtual std::string name() const = 0;
  virtual OccupancySequence predict(
    const std::vector<AgentTrack> & agents, const Trajectory & ego_proposal,
    const VehicleParams & ego, const GridSpec & spec, const PredictionContext & ctx) = 0;
  /// Same result written into `out`, reusing its buffers where possible.
  virtual void predict_into(
    const std::vector<AgentTrack> & agents, const Trajectory & ego_proposal, const VehicleParams & ego,
    const GridSpec & spec, const PredictionContext & ctx, OccupancySequence & out)
  {
    out = predict(agents, ego_proposal, ego, spec, ctx);
  }
};

/// "cv", "ego-cond", or "file:<path>". A file path is used for every request;
/// a directory is searched for tick_<tick>_mode_<mode>.hypg.
std::unique_ptr<OccupancyPredictor> make_predictor(const std::string & choice, const OccupancyParams & params);

}  // namespace pgmcts

#endif  // PGMCTS__OCCUPANCY_HPP_
