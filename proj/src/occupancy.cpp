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

#include "pgmcts/occupancy.hpp"

#include "pgmcts/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace pgmcts
{

namespace
{

struct Motion
{
  Pose2 pose;
  Vec2 direction = Vec2::UnitX();
  double speed = 0.0;
};

Motion estimate_motion(const AgentTrack & agent)
{
  if (agent.poses.empty()) {
    throw Error(ErrorKind::ScenarioInvalid, "agent " + agent.id + " has no observed pose");
  }
  Motion m;
  m.pose = agent.poses.back();
  m.direction = heading_vector(m.pose.theta);
  if (agent.poses.size() >= 2) {
    const Vec2 delta = m.pose.position() - agent.poses[agent.poses.size() - 2].position();
    const double dist = delta.norm();
    if (dist > 1e-9) {
      m.direction = delta / dist;
      m.speed = dist / kTickSeconds;
    }
  }
  return m;
}

// Distance travelled after t seconds when braking at `decel` (< 0) during
// [t_brake, t_brake + duration], constant speed otherwise, never reversing.
double travel_at(double t, double v0, double t_brake, double duration, double decel)
{
  if (t <= t_brake) {
    return v0 * t;
  }
  const double stop_time = v0 / -decel;
  const double d_eff = std::min(duration, stop_time);
  const double s_brake = v0 * t_brake;
  const double tau = t - t_brake;
  if (tau <= d_eff) {
    return s_brake + v0 * tau + 0.5 * decel * tau * tau;
  }
  const double v_end = std::max(0.0, v0 + decel * d_eff);
  return s_brake + v0 * d_eff + 0.5 * decel * d_eff * d_eff + v_end * (tau - d_eff);
}

AgentForecast make_forecast(
  const Motion & m, const OccupancyParams & params, double t_brake, double duration)
{
  AgentForecast f;
  f.poses.reserve(static_cast<std::size_t>(params.steps));
  f.travel.reserve(static_cast<std::size_t>(params.steps));
  for (int i = 0; i < params.steps; ++i) {
    const double t = (i + 1) * params.dt;
    const double s = duration > 0.0 ? travel_at(t, m.speed, t_brake, duration, params.yield_decel) : m.speed * t;
    const Vec2 p = m.pose.position() + m.direction * s;
    f.poses.push_back({p.x(), p.y(), m.pose.theta});
    f.travel.push_back(s);
  }
  return f;
}

// Footprints are convex, so each row holds at most one span and rows ascend.
bool spans_overlap(const Footprint & a, const Footprint & b)
{
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.spans.size() && j < b.spans.size()) {
    const RowSpan & x = a.spans[i];
    const RowSpan & y = b.spans[j];
    if (x.row < y.row) {
      ++i;
    } else if (y.row < x.row) {
      ++j;
    } else {
      if (std::max(x.col_begin, y.col_begin) < std::min(x.col_end, y.col_end)) {
        return true;
      }
      ++i;
      ++j;
    }
  }
  return false;
}

Footprint spans_intersection(const Footprint & a, const Footprint & b)
{
  Footprint out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.spans.size() && j < b.spans.size()) {
    const RowSpan & x = a.spans[i];
    const RowSpan & y = b.spans[j];
    if (x.row < y.row) {
      ++i;
    } else if (y.row < x.row) {
      ++j;
    } else {
      const int lo = std::max(x.col_begin, y.col_begin);
      const int hi = std::min(x.col_end, y.col_end);
      if (lo < hi) {
        out.spans.push_back({x.row, lo, hi});
      }
      ++i;
      ++j;
    }
  }
  return out;
}

// Footprints indexed by time step k = 0..steps (k = 0 is the current pose).
std::vector<Footprint> agent_footprints(
  const AgentTrack & agent, const Pose2 & current, const AgentForecast & f, const GridSpec & spec)
{
  std::vector<Footprint> out(f.poses.size() + 1);
  rasterize_footprint_spans(current, agent.dims, spec, out[0]);
  for (std::size_t i = 0; i < f.poses.size(); ++i) {
    rasterize_footprint_spans(f.poses[i], agent.dims, spec, out[i + 1]);
  }
  return out;
}

bool has_conflict(const std::vector<Footprint> & agent, const std::vector<Footprint> & ego, int window)
{
  const int n = static_cast<int>(agent.size()) - 1;
  for (int ka = 1; ka <= n; ++ka) {
    for (int ke = std::max(1, ka - window); ke <= std::min(n, ka + window); ++ke) {
      if (spans_overlap(agent[static_cast<std::size_t>(ka)], ego[static_cast<std::size_t>(ke)])) {
        return true;
      }
    }
  }
  return false;
}

std::optional<int> first_arrival(const std::vector<Footprint> & seq, const Footprint & cells)
{
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (spans_overlap(seq[k], cells)) {
      return static_cast<int>(k);
    }
  }
  return std::nullopt;
}

std::vector<double> gaussian_kernel(double sigma, int radius)
{
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    const double v = std::exp(-0.5 * d * d / (sigma * sigma));
    w[static_cast<std::size_t>(d + radius)] = v;
    total += v;
  }
  for (double & v : w) {
    v /= total;
  }
  return w;
}

// Blurs one rasterized footprint inside a local patch and max-composites it.
void splat_blurred(
  Grid & grid, const Footprint & fp, double sigma, std::vector<double> & patch, std::vector<double> & tmp)
{
  if (fp.empty()) {
    return;
  }
  const GridSpec & spec = grid.spec;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  int c_min = fp.spans.front().col_begin;
  int c_max = fp.spans.front().col_end;
  for (const RowSpan & s : fp.spans) {
    c_min = std::min(c_min, s.col_begin);
    c_max = std::max(c_max, s.col_end);
  }
  const int r0 = fp.spans.front().row - radius;
  const int r1 = fp.spans.back().row + radius + 1;
  const int c0 = c_min - radius;
  const int c1 = c_max + radius;
  if (r1 <= 0 || c1 <= 0 || r0 >= spec.rows || c0 >= spec.cols) {
    return;
  }
  const int pr = r1 - r0;
  const int pc = c1 - c0;
  const std::vector<double> w = gaussian_kernel(sigma, radius);

  // Horizontal pass straight from the spans: each source row is a box of
  // ones, so the response is a difference of kernel prefix sums.
  std::vector<double> prefix(w.size() + 1, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    prefix[i + 1] = prefix[i] + w[i];
  }
  tmp.assign(static_cast<std::size_t>(pr) * static_cast<std::size_t>(pc), 0.0);
  for (const RowSpan & s : fp.spans) {
    double * row = tmp.data() + static_cast<std::ptrdiff_t>(s.row - r0) * pc;
    for (int c = 0; c < pc; ++c) {
      // Kernel taps d with col c + c0 - d inside [col_begin, col_end).
      const int col = c + c0;
      const int d_lo = std::max(-radius, col - s.col_end + 1);
      const int d_hi = std::min(radius, col - s.col_begin);
      if (d_lo <= d_hi) {
        row[c] = prefix[static_cast<std::size_t>(d_hi + radius + 1)] - prefix[static_cast<std::size_t>(d_lo + radius)];
      }
    }
  }
  patch.assign(tmp.size(), 0.0);
  for (int r = 0; r < pr; ++r) {
    const int g_row = r + r0;
    if (g_row < 0 || g_row >= spec.rows) {
      continue;
    }
    double * out = patch.data() + static_cast<std::ptrdiff_t>(r) * pc;
    for (int d = -radius; d <= radius; ++d) {
      const int src = r - d;
      if (src < 0 || src >= pr) {
        continue;
      }
      const double wd = w[static_cast<std::size_t>(d + radius)];
      const double * in = tmp.data() + static_cast<std::ptrdiff_t>(src) * pc;
      for (int c = 0; c < pc; ++c) {
        out[c] += wd * in[c];
      }
    }
    const int b = std::max(0, c0);
    const int e = std::min(spec.cols, c1);
    if (grid.dirty) {
      grid.dirty->include({g_row, b, g_row + 1, e});
    }
    float * dst = grid.values.data() + static_cast<std::ptrdiff_t>(g_row) * spec.cols;
    for (int gc = b; gc < e; ++gc) {
      const float v = static_cast<float>(std::clamp(out[gc - c0], 0.0, 1.0));
      dst[gc] = std::max(dst[gc], v);
    }
  }
}

void reset_sequence(OccupancySequence & out, const GridSpec & spec, const OccupancyParams & params)
{
  out.spec = spec;
  out.horizon = params.steps * params.dt;
  out.grids.resize(static_cast<std::size_t>(params.steps));
  for (Grid & g : out.grids) {
    if (g.values.rows() != spec.rows || g.values.cols() != spec.cols) {
      g = Grid(spec, GridSemantics::Probability);
      g.dirty = CellBox{};
    } else {
      g.spec = spec;
      g.semantics = GridSemantics::Probability;
      g.refill(0.0F);
    }
  }
}

}  // namespace

AgentForecast forecast_constant_velocity(const AgentTrack & agent, const OccupancyParams & params)
{
  return make_forecast(estimate_motion(agent), params, 0.0, 0.0);
}

AgentForecast forecast_yielding(
  const AgentTrack & agent, const Trajectory & ego_proposal, const VehicleParams & ego,
  const GridSpec & spec, const OccupancyParams & params)
{
  if (static_cast<int>(ego_proposal.size()) != params.steps + 1) {
    throw Error(
      ErrorKind::LengthMismatch, "ego proposal has " + std::to_string(ego_proposal.size()) + " states, expected " +
                                   std::to_string(params.steps + 1));
  }
  const Motion m = estimate_motion(agent);
  AgentForecast cv = make_forecast(m, params, 0.0, 0.0);
  if (m.speed <= 0.0) {
    return cv;
  }

  std::vector<Footprint> ego_fp(ego_proposal.size());
  for (std::size_t k = 0; k < ego_proposal.size(); ++k) {
    rasterize_footprint_spans(body_center(ego_proposal[k], ego), ego.dims(), spec, ego_fp[k]);
  }
  const std::vector<Footprint> agent_fp = agent_footprints(agent, m.pose, cv, spec);
  const int window = static_cast<int>(std::floor(params.conflict_window / params.dt + 1e-9));

  // First conflict: earliest agent step, then earliest ego step in the window.
  Footprint cells;
  for (int ka = 1; ka <= params.steps && cells.empty(); ++ka) {
    for (int ke = std::max(1, ka - window); ke <= std::min(params.steps, ka + window); ++ke) {
      const Footprint inter =
        spans_intersection(agent_fp[static_cast<std::size_t>(ka)], ego_fp[static_cast<std::size_t>(ke)]);
      if (!inter.empty()) {
        cells = inter;
        cv.conflict_step = ka - 1;
        break;
      }
    }
  }
  if (cells.empty()) {
    return cv;
  }
  const std::optional<int> ego_arrive = first_arrival(ego_fp, cells);
  const std::optional<int> agent_arrive = first_arrival(agent_fp, cells);
  if (!ego_arrive || !agent_arrive || *ego_arrive >= *agent_arrive) {
    return cv;
  }

  const double t_brake = std::max(0.0, *agent_arrive * params.dt - params.reaction_lead);
  const double stop_time = m.speed / -params.yield_decel;
  const int max_k = std::max(1, static_cast<int>(std::ceil(stop_time / params.dt - 1e-9)));
  AgentForecast chosen;
  for (int k = 1; k <= max_k; ++k) {
    const double duration = k == max_k ? stop_time : k * params.dt;
    AgentForecast f = make_forecast(m, params, t_brake, duration);
    chosen = f;
    if (!has_conflict(agent_footprints(agent, m.pose, f, spec), ego_fp, window)) {
      break;
    }
  }
  chosen.yielding = true;
  chosen.conflict_step = cv.conflict_step;
  return chosen;
}

void render_forecasts(
  const std::vector<AgentTrack> & agents, const std::vector<AgentForecast> & forecasts,
  const GridSpec & spec, const OccupancyParams & params, OccupancySequence & out)
{
  if (agents.size() != forecasts.size()) {
    throw Error(ErrorKind::LengthMismatch, "one forecast per agent required");
  }
  reset_sequence(out, spec, params);
  std::vector<double> patch;
  std::vector<double> tmp;
  Footprint fp;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const AgentForecast & f = forecasts[a];
    for (int i = 0; i < params.steps && i < static_cast<int>(f.poses.size()); ++i) {
      rasterize_footprint_spans(f.poses[static_cast<std::size_t>(i)], agents[a].dims, spec, fp);
      splat_blurred(out.grids[static_cast<std::size_t>(i)], fp, params.sigma_at(i), patch, tmp);
    }
  }
}

OccupancySequence predict_constant_velocity(
  const std::vector<AgentTrack> & agents, const GridSpec & spec, const OccupancyParams & params)
{
  std::vector<AgentForecast> forecasts;
  forecasts.reserve(agents.size());
  for (const AgentTrack & a : agents) {
    forecasts.push_back(forecast_constant_velocity(a, params));
  }
  OccupancySequence out;
  render_forecasts(agents, forecasts, spec, params, out);
  return out;
}

OccupancySequence predict_ego_conditioned_yield(
  const std::vector<AgentTrack> & agents, const Trajectory & ego_proposal, const VehicleParams & ego,
  const GridSpec & spec, const OccupancyParams & params)
{
  if (static_cast<int>(ego_proposal.size()) != params.steps + 1) {
    throw Error(
      ErrorKind::LengthMismatch, "ego proposal has " + std::to_string(ego_proposal.size()) + " states, expected " +
                                   std::to_string(params.steps + 1));
  }
  std::vector<AgentForecast> forecasts;
  forecasts.reserve(agents.size());
  for (const AgentTrack & a : agents) {
    forecasts.push_back(forecast_yielding(a, ego_proposal, ego, spec, params));
  }
  OccupancySequence out;
  render_forecasts(agents, forecasts, spec, params, out);
  return out;
}

OccupancySequence load_occupancy(
  const std::string & path, const GridSpec & spec, int steps, std::vector<std::string> * warnings)
{
  HypgFile file = read_hypg(path);
  if (
    static_cast<int>(file.header.rows) != spec.rows || static_cast<int>(file.header.cols) != spec.cols ||
    file.header.resolution != static_cast<float>(spec.resolution)) {
    std::ostringstream msg;
    msg << path << " is " << file.header.rows << "x" << file.header.cols << " at " << file.header.resolution
        << " m, expected " << spec.rows << "x" << spec.cols << " at " << spec.resolution << " m";
    throw Error(ErrorKind::SpecMismatch, msg.str());
  }
  if (static_cast<int>(file.header.count) != steps) {
    throw Error(
      ErrorKind::SpecMismatch,
      path + " holds " + std::to_string(file.header.count) + " grids, expected " + std::to_string(steps));
  }
  OccupancySequence out;
  out.spec = spec;
  out.horizon = steps * kTickSeconds;
  std::size_t clamped = 0;
  for (GridArray<float> & values : file.grids) {
    if (values.isNaN().any()) {
      throw Error(ErrorKind::FormatError, path + " contains NaN occupancy");
    }
    clamped += static_cast<std::size_t>(((values < 0.0F) || (values > 1.0F)).count());
    Grid g;
    g.spec = spec;
    g.semantics = GridSemantics::Probability;
    g.values = values.max(0.0F).min(1.0F);
    out.grids.push_back(std::move(g));
  }
  if (clamped > 0) {
    const std::string msg = path + ": clamped " + std::to_string(clamped) + " occupancy values to [0, 1]";
    if (warnings != nullptr) {
      warnings->push_back(msg);
    } else {
      std::cerr << "warning: " << msg << "\n";
    }
  }
  return out;
}

void save_occupancy(const std::string & path, const OccupancySequence & seq)
{
  write_hypg(path, seq.grids);
}

namespace
{

class ConstantVelocityPredictor : public OccupancyPredictor
{
public:
  explicit ConstantVelocityPredictor(const OccupancyParams & p) : params_(p) {}
  std::string name() const override { return "cv"; }
  OccupancySequence predict(
    const std::vector<AgentTrack> & agents, const Trajectory &, const VehicleParams &, const GridSpec & spec,
    const PredictionContext &) override
  {
    return predict_constant_velocity(agents, spec, params_);
  }
  void predict_into(
    const std::vector<AgentTrack> & agents, const Trajectory &, const VehicleParams &, const GridSpec & spec,
    const PredictionContext &, OccupancySequence & out) override
  {
    std::vector<AgentForecast> forecasts;
    for (const AgentTrack & a : agents) {
      forecasts.push_back(forecast_constant_velocity(a, params_));
    }
    render_forecasts(agents, forecasts, spec, params_, out);
  }

private:
  OccupancyParams params_;
};

class YieldPredictor : public OccupancyPredictor
{
public:
  explicit YieldPredictor(const OccupancyParams & p) : params_(p) {}
  std::string name() const override { return "ego-cond"; }
  OccupancySequence predict(
    const std::vector<AgentTrack> & agents, const Trajectory & ego_proposal, const VehicleParams & ego,
    const GridSpec & spec, const PredictionContext &) override
  {
    return predict_ego_conditioned_yield(agents, ego_proposal, ego, spec, params_);
  }
  void predict_into(
    const std::vector<AgentTrack> & agents, const Trajectory & ego_proposal, const VehicleParams & ego,
    const GridSpec & spec, const PredictionContext & ctx, OccupancySequence & out) override
  {
    if (static_cast<int>(ego_proposal.size()) != params_.steps + 1) {
      out = predict(agents, ego_proposal, ego, spec, ctx);  // throws LengthMismatch
      return;
    }
    std::vector<AgentForecast> forecasts;
    for (const AgentTrack & a : agents) {
      forecasts.push_back(forecast_yielding(a, ego_proposal, ego, spec, params_));
    }
    render_forecasts(agents, forecasts, spec, params_, out);
  }

private:
  OccupancyParams params_;
};

class FilePredictor : public OccupancyPredictor
{
public:
  FilePredictor(std::string path, const OccupancyParams & p) : path_(std::move(path)), params_(p) {}
  std::string name() const override { return "file:" + path_; }
  OccupancySequence predict(
    const std::vector<AgentTrack> &, const Trajectory &, const VehicleParams &, const GridSpec & spec,
    const PredictionContext & ctx) override
  {
    std::filesystem::path p(path_);
    if (std::filesystem::is_directory(p)) {
      p /= "tick_" + std::to_string(ctx.tick) + "_mode_" + std::to_string(ctx.mode) + ".hypg";
    }
    return load_occupancy(p.string(), spec, params_.steps);
  }

private:
  std::string path_;
  OccupancyParams params_;
};

}  // namespace

std::unique_ptr<OccupancyPredictor> make_predictor(const std::string & choice, const OccupancyParams & params)
{
  if (choice == "cv") {
    return std::make_unique<ConstantVelocityPredictor>(params);
  }
  if (choice == "ego-cond") {
    return std::make_unique<YieldPredictor>(params);
  }
  if (choice.rfind("file:", 0) == 0 && choice.size() > 5) {
    return std::make_unique<FilePredictor>(choice.substr(5), params);
  }
  throw Error(ErrorKind::FormatError, "unknown predictor '" + choice + "' (cv, ego-cond, file:<path>)");
}

}  // namespace pgmcts
