#ifndef REACHTRACK_OFFLINE_SCREEN_HPP
#define REACHTRACK_OFFLINE_SCREEN_HPP

// Pre-run screen. Each sample puts the state on the reference at s and
// evaluates the same margin the online tracker does; runs of delta > 0
// merge into unsafe intervals.

#include <vector>

#include "reachtrack/core.hpp"
#include "reachtrack/plant.hpp"
#include "reachtrack/ref_path.hpp"
#include "reachtrack/tracker.hpp"

namespace reachtrack {

struct ScreenSample {
  double s = 0.0;
  double u_req = 0.0;
  double delta = 0.0;
};

struct UnsafeInterval {
  double s_start = 0.0;
  double s_end = 0.0;
};

struct ScreenReport {
  std::vector<ScreenSample> samples;
  std::vector<UnsafeInterval> unsafe_intervals;
  double sigma_used = 0.0;
  bool passed = true;
};

/// Parameter-uniform grid of n_samples points over [0, T].
template <int Dim>
double screen_parameter(const ReferencePath<Dim>& path, std::size_t j, std::size_t n_samples) {
  if (j + 1 == n_samples) return path.duration();
  return path.duration() * static_cast<double>(j) / static_cast<double>(n_samples - 1);
}

template <int Dim>
ScreenReport screen_path(const ReferencePath<Dim>& path, const Limits& limits, const NoiseBounds& nb,
                         std::size_t n_samples = 1000) {
  limits.validate();
  if (n_samples < 2) throw ConfigError("screen needs n_samples >= 2");
  const double sigma = sigma_buffer(nb, limits.t_s);
  if (!(sigma < limits.a_max)) throw ConfigError("noise buffer sigma must be < a_max for the screen");

  ScreenReport report;
  report.sigma_used = sigma;
  report.samples.reserve(n_samples);
  bool open = false;
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double s = screen_parameter(path, j, n_samples);
    const auto ref = path.sample(s);
    const auto m = assess_margin<Dim>(path, ref.p, ref.v, limits, sigma);
    report.samples.push_back({s, m.u_req, m.delta});
    if (m.delta > 0.0) {
      if (!open) report.unsafe_intervals.push_back({s, s});
      report.unsafe_intervals.back().s_end = s;
      open = true;
    } else {
      open = false;
    }
  }
  report.passed = report.unsafe_intervals.empty();
  return report;
}

/// Look-ahead scale per screen sample: 1 where the sample is safe, otherwise
/// the largest scale (by bisection) whose capped reference state has
/// delta <= 0. The capped state moves at scale * v_ref and aims at a target
/// shifted by scale * t_s.
template <int Dim>
SpeedCapTable build_speed_caps(const ReferencePath<Dim>& path, const ScreenReport& report, const Limits& limits) {
  SpeedCapTable table;
  table.t_total = path.duration();
  table.scale.assign(report.samples.size(), 1.0);
  for (std::size_t j = 0; j < report.samples.size(); ++j) {
    const auto& smp = report.samples[j];
    if (smp.delta <= 0.0) continue;
    const auto ref = path.sample(smp.s);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto m = assess_at<Dim>(path, smp.s, ref.p, Vec<Dim>(mid * ref.v), limits, report.sigma_used, mid);
      (m.delta <= 0.0 ? lo : hi) = mid;
    }
    table.scale[j] = lo > 0.0 ? lo : 1e-6;
  }
  return table;
}

}  // namespace reachtrack

#endif  // REACHTRACK_OFFLINE_SCREEN_HPP
