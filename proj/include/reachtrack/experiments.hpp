#ifndef REACHTRACK_EXPERIMENTS_HPP
#define REACHTRACK_EXPERIMENTS_HPP

// Closed-loop trials and metrics. Row k of a trace: target and margin at
// x_k, command u_k, state x_{k+1}. Freeze rows are masked out of metrics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "reachtrack/baseline_pp.hpp"
#include "reachtrack/core.hpp"
#include "reachtrack/offline_screen.hpp"
#include "reachtrack/plant.hpp"
#include "reachtrack/ref_path.hpp"
#include "reachtrack/tracker.hpp"

namespace reachtrack {

enum class Controller { qp, pp };

inline const char* to_string(Controller c) { return c == Controller::qp ? "qp" : "pp"; }

/// Raised when a metric is requested over an empty moving window.
class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TrialConfig {
  std::uint64_t seed = 1;
  double duration = 10.0;
  double freeze_duration = 1.0;
  std::optional<double> freeze_start;  // empty: uniform-random
  Workspace workspace;
  double path_duration = 10.0;
  int grid_resolution = ReferencePath<2>::kDefaultGrid;
  Limits limits;
  NoiseBounds noise;
  WeightPolicy policy;
  Controller controller = Controller::qp;
  PpGains pp_gains;
  bool mask_braking = true;
  bool speed_cap = false;
  std::size_t screen_samples = 1000;

  void validate() const {
    workspace.validate();
    limits.validate();
    noise.validate(limits);
    policy.validate();
    pp_gains.validate();
    if (!(duration > 0.0)) throw ConfigError("experiment.duration must be > 0");
    if (!(path_duration > 0.0)) throw ConfigError("experiment.path_duration must be > 0");
    if (grid_resolution < 2) throw ConfigError("experiment.grid_resolution must be >= 2");
    if (screen_samples < 2) throw ConfigError("experiment.screen_samples must be >= 2");
    if (!(freeze_duration >= 0.0 && freeze_duration <= duration)) {
      throw ConfigError("freeze window must fit inside [0, duration]");
    }
    if (freeze_start && !(*freeze_start >= 0.0 && *freeze_start + freeze_duration <= duration)) {
      throw ConfigError("freeze window must fit inside [0, duration]");
    }
  }
};

struct TraceRow {
  double t = 0.0;
  Vec2 p = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  Vec2 u = Vec2::Zero();
  Vec2 p_la = Vec2::Zero();
  Vec2 v_la = Vec2::Zero();
  double u_req = 0.0;
  double delta = 0.0;
  double C = 0.0;
  Mode mode = Mode::tracking;
  ActiveSet active_set = ActiveSet::none;
  bool moving = true;

  bool operator==(const TraceRow&) const = default;
};

struct TrialResult {
  std::uint64_t seed = 0;
  Controller controller = Controller::qp;
  std::vector<TraceRow> trace;
  double rmse_p = 0.0;
  double rmse_v = 0.0;
  double mean_delta = 0.0;
  std::size_t freeze_begin = 0;  // first step index of the freeze window
  std::size_t freeze_steps = 0;
  double t_s = 0.0;
};

struct RmsePair {
  double p = 0.0;
  double v = 0.0;
};

/// RMSE of (x - x_LA) over moving rows, separately for position and velocity.
inline RmsePair rmse(std::span<const TraceRow> trace) {
  double sp = 0.0, sv = 0.0;
  std::size_t n = 0;
  for (const auto& row : trace) {
    if (!row.moving) continue;
    sp += (row.p - row.p_la).squaredNorm();
    sv += (row.v - row.v_la).squaredNorm();
    ++n;
  }
  if (n == 0) throw MetricError("rmse undefined: no moving samples");
  return {std::sqrt(sp / static_cast<double>(n)), std::sqrt(sv / static_cast<double>(n))};
}

inline double mean_margin(std::span<const TraceRow> trace) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : trace) {
    if (!row.moving) continue;
    sum += row.delta;
    ++n;
  }
  if (n == 0) throw MetricError("mean margin undefined: no moving samples");
  return sum / static_cast<double>(n);
}

struct FreezeWindow {
  std::size_t begin = 0;
  std::size_t steps = 0;
};

inline FreezeWindow freeze_window(const TrialConfig& cfg, std::size_t total_steps) {
  FreezeWindow w;
  w.steps = static_cast<std::size_t>(std::lround(cfg.freeze_duration / cfg.limits.t_s));
  w.steps = std::min(w.steps, total_steps);
  if (w.steps == 0) return w;
  double start = 0.0;
  if (cfg.freeze_start) {
    start = *cfg.freeze_start;
  } else {
    auto rng = make_rng(cfg.seed, Stream::freeze);
    std::uniform_real_distribution<double> u(0.0, cfg.duration - cfg.freeze_duration);
    start = u(rng);
  }
  w.begin = std::min(static_cast<std::size_t>(std::floor(start / cfg.limits.t_s + 1e-9)), total_steps - w.steps);
  return w;
}

/// Complete closed-loop run. Deterministic per configuration.
inline TrialResult run_trial(const TrialConfig& cfg) {
  cfg.validate();
  const auto path = random_path(cfg.seed, cfg.workspace, cfg.path_duration, cfg.grid_resolution);
  const Limits& lim = cfg.limits;
  const double sigma = sigma_buffer(cfg.noise, lim.t_s);

  std::optional<SpeedCapTable> caps;
  if (cfg.speed_cap) {
    const auto report = screen_path<2>(path, lim, cfg.noise, cfg.screen_samples);
    caps = build_speed_caps<2>(path, report, lim);
  }
  const SpeedCapTable* cap_ptr = caps ? &*caps : nullptr;

  const auto steps = static_cast<std::size_t>(std::lround(cfg.duration / lim.t_s));
  const FreezeWindow fw = freeze_window(cfg, steps);

  TrialResult res;
  res.seed = cfg.seed;
  res.controller = cfg.controller;
  res.freeze_begin = fw.begin;
  res.freeze_steps = fw.steps;
  res.t_s = lim.t_s;
  res.trace.reserve(steps);

  auto noise_rng = make_rng(cfg.seed, Stream::noise);
  Tracker<2> tracker(path, lim, cfg.noise, cfg.policy, cap_ptr);
  PlantState<2> state;
  state.p = path.waypoints().front();

  bool at_rest = false;
  for (std::size_t k = 0; k < steps; ++k) {
    const bool freeze = fw.steps > 0 && k >= fw.begin && k < fw.begin + fw.steps;
    TraceRow row;
    if (cfg.controller == Controller::qp) {
      const auto d = tracker.step(state, freeze);
      row.u = d.u;
      row.p_la = d.target.p;
      row.v_la = d.target.v;
      row.u_req = d.u_req;
      row.delta = d.delta;
      row.C = d.C_used;
      row.mode = d.mode;
      row.active_set = d.active_set;
    } else {
      const auto m = assess_margin<2>(path, state.p, state.v, lim, sigma, cap_ptr);
      if (freeze) {
        row.u = brake_command<2>(state.v, lim);
        row.mode = state.v.isZero(0.0) ? Mode::frozen : Mode::braking;
      } else {
        row.u = pp_step<2>(state, m.target, cfg.pp_gains, lim).u;
      }
      row.p_la = m.target.p;
      row.v_la = m.target.v;
      row.u_req = m.u_req;
      row.delta = m.delta;
    }
    if (freeze && state.v.norm() <= lim.a_max * lim.t_s) at_rest = true;
    if (!freeze) at_rest = false;
    row.moving = !freeze || (!cfg.mask_braking && !at_rest);
    state.frozen = freeze;

    const auto ns = sample_noise<2>(noise_rng, cfg.noise);
    state = step<2>(state, row.u, ns, lim.t_s);
    row.t = state.t;
    row.p = state.p;
    row.v = state.v;
    res.trace.push_back(row);
  }

  const auto e = rmse(res.trace);
  res.rmse_p = e.p;
  res.rmse_v = e.v;
  res.mean_delta = mean_margin(res.trace);
  return res;
}

/// Runs trials seeds base.seed + i for each requested controller. Results are
/// ordered by (trial, controller) regardless of thread scheduling.
inline std::vector<TrialResult> run_batch(const TrialConfig& base, std::size_t trials,
                                          const std::vector<Controller>& controllers, unsigned threads = 1) {
  base.validate();
  std::vector<TrialConfig> jobs;
  for (std::size_t i = 0; i < trials; ++i) {
    for (auto c : controllers) {
      TrialConfig cfg = base;
      cfg.seed = base.seed + i;
      cfg.controller = c;
      jobs.push_back(cfg);
    }
  }
  std::vector<TrialResult> results(jobs.size());
  if (threads <= 1 || jobs.size() <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) results[j] = run_trial(jobs[j]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  const auto workers = std::min<std::size_t>(threads, jobs.size());
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < jobs.size(); j = next++) results[j] = run_trial(jobs[j]);
    });
  }
  pool.clear();
  return results;
}

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
};

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;
};

struct ControllerSummary {
  Controller controller = Controller::qp;
  std::size_t runs = 0;
  MetricStats rmse_p;
  MetricStats rmse_v;
  MetricStats mean_delta;
  std::vector<double> per_run_mean_delta;
  std::vector<double> delta_curve;  // average delta(T) on the normalized grid
  Histogram histogram;
};

struct BatchSummary {
  std::vector<double> grid;  // normalized moving time in [0, 1]
  std::vector<ControllerSummary> controllers;

  const ControllerSummary* find(Controller c) const {
    for (const auto& s : controllers) {
      if (s.controller == c) return &s;
    }
    return nullptr;
  }
};

inline MetricStats mean_std(std::span<const double> xs) {
  MetricStats m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

/// Moving-sample delta series linearly resampled onto grid_points uniform
/// points of normalized time; first and last moving samples map to 0 and 1.
inline std::vector<double> resample_moving_delta(std::span<const TraceRow> trace, std::size_t grid_points) {
  std::vector<double> series;
  for (const auto& row : trace) {
    if (row.moving) series.push_back(row.delta);
  }
  std::vector<double> out(grid_points, 0.0);
  if (series.empty() || grid_points == 0) return out;
  if (series.size() == 1 || grid_points == 1) {
    std::fill(out.begin(), out.end(), series.front());
    if (grid_points > 1) out.back() = series.back();
    return out;
  }
  const double last = static_cast<double>(series.size() - 1);
  for (std::size_t g = 0; g < grid_points; ++g) {
    if (g + 1 == grid_points) {
      out[g] = series.back();
      continue;
    }
    const double x = static_cast<double>(g) / static_cast<double>(grid_points - 1) * last;
    const auto i = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(i);
    out[g] = i + 1 < series.size() ? series[i] + f * (series[i + 1] - series[i]) : series[i];
  }
  return out;
}

inline Histogram make_histogram(std::span<const double> xs, std::size_t bins) {
  Histogram h;
  if (xs.empty()) return h;
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (*mx == *mn || bins <= 1) {
    h.lo = *mn - 0.5;
    h.width = (*mx - *mn) + 1.0;
    h.counts.assign(1, xs.size());
    return h;
  }
  h.lo = *mn;
  h.width = (*mx - *mn) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double x : xs) {
    auto b = static_cast<std::size_t>((x - h.lo) / h.width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

inline BatchSummary aggregate(std::span<const TrialResult> results, std::size_t grid_points = 200,
                              std::size_t histogram_bins = 10) {
  BatchSummary out;
  out.grid.resize(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    out.grid[g] = grid_points == 1 ? 0.0 : static_cast<double>(g) / static_cast<double>(grid_points - 1);
  }
  for (auto c : {Controller::qp, Controller::pp}) {
    std::vector<double> rp, rv, md;
    std::vector<double> curve(grid_points, 0.0);
    for (const auto& r : results) {
      if (r.controller != c) continue;
      rp.push_back(r.rmse_p);
      rv.push_back(r.rmse_v);
      md.push_back(r.mean_delta);
      const auto series = resample_moving_delta(r.trace, grid_points);
      for (std::size_t g = 0; g < grid_points; ++g) curve[g] += series[g];
    }
    if (rp.empty()) continue;
    for (auto& x : curve) x /= static_cast<double>(rp.size());
    ControllerSummary s;
    s.controller = c;
    s.runs = rp.size();
    s.rmse_p = mean_std(rp);
    s.rmse_v = mean_std(rv);
    s.mean_delta = mean_std(md);
    s.per_run_mean_delta = md;
    s.delta_curve = std::move(curve);
    s.histogram = make_histogram(md, histogram_bins);
    out.controllers.push_back(std::move(s));
  }
  return out;
}

}  // namespace reachtrack

#endif  // REACHTRACK_EXPERIMENTS_HPP
