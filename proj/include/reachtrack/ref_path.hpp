#ifndef REACHTRACK_REF_PATH_HPP
#define REACHTRACK_REF_PATH_HPP

// Waypoints and C2 reference paths. Time-parameterized over [0, T] with
// chord-length segment durations; a dense grid seeds closest-point queries.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "reachtrack/core.hpp"

namespace reachtrack {

struct Workspace {
  double lx = 0.5;
  double ly = 0.5;
  int n_wp = 6;

  void validate() const {
    if (!(lx > 0.0)) throw ConfigError("workspace.Lx must be > 0");
    if (!(ly > 0.0)) throw ConfigError("workspace.Ly must be > 0");
    if (n_wp < 2) throw ConfigError("workspace.n_wp must be >= 2");
  }
};

/// Origin followed by n_wp points (Lx cos(theta), Ly sin(theta)) with
/// theta drawn uniformly in [0, 2 pi). Deterministic per seed.
inline std::vector<Vec2> generate_waypoints(std::uint64_t seed, const Workspace& ws) {
  ws.validate();
  auto rng = make_rng(seed, Stream::waypoints);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(ws.n_wp) + 1);
  points.emplace_back(0.0, 0.0);
  for (int i = 0; i < ws.n_wp; ++i) {
    const double theta = angle(rng);
    points.emplace_back(ws.lx * std::cos(theta), ws.ly * std::sin(theta));
  }
  return points;
}

/// Segment durations proportional to chord length, summing to t_total.
template <int Dim>
std::vector<double> chord_durations(std::span<const Vec<Dim>> waypoints, double t_total) {
  std::vector<double> lengths;
  lengths.reserve(waypoints.size());
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double d = (waypoints[i] - waypoints[i - 1]).norm();
    if (!(d > 0.0)) throw ConfigError("degenerate segment: coincident consecutive waypoints");
    lengths.push_back(d);
    total += d;
  }
  for (auto& d : lengths) d = t_total * d / total;
  return lengths;
}

template <int Dim>
struct PathSample {
  Vec<Dim> p;
  Vec<Dim> v;
  Vec<Dim> a;
  bool clamped = false;
};

template <int Dim>
struct LookaheadTarget {
  double s_c = 0.0;   // closest-point parameter
  double s_la = 0.0;  // shifted parameter actually evaluated
  Vec<Dim> p = Vec<Dim>::Zero();
  Vec<Dim> v = Vec<Dim>::Zero();
};

template <int Dim>
class ReferencePath {
 public:
  using VecD = Vec<Dim>;

  // Cubic in local time tau = t - t_i: c0 + c1 tau + c2 tau^2 + c3 tau^3.
  struct Segment {
    std::array<VecD, 4> c;
  };

  struct GridPoint {
    double t;
    VecD p;
    VecD v;
    VecD a;
  };

  static constexpr int kDefaultGrid = 2000;

  ReferencePath(std::vector<VecD> waypoints, double t_total, int grid_resolution = kDefaultGrid)
      : waypoints_(std::move(waypoints)), t_total_(t_total) {
    if (waypoints_.size() < 2) throw ConfigError("reference path needs at least 2 waypoints");
    if (!(t_total_ > 0.0) || !std::isfinite(t_total_)) throw ConfigError("path duration must be > 0");
    if (grid_resolution < 2) throw ConfigError("grid resolution must be >= 2");

    const auto durations = chord_durations<Dim>(waypoints_, t_total_);
    breaks_.resize(waypoints_.size());
    breaks_[0] = 0.0;
    for (std::size_t i = 0; i < durations.size(); ++i) breaks_[i + 1] = breaks_[i] + durations[i];
    breaks_.back() = t_total_;
    for (std::size_t i = 1; i < breaks_.size(); ++i) {
      if (!(breaks_[i] > breaks_[i - 1])) throw ConfigError("break times must be strictly increasing");
    }
    fit_natural_spline();
    build_grid(grid_resolution);
  }

  double duration() const { return t_total_; }
  const std::vector<VecD>& waypoints() const { return waypoints_; }
  const std::vector<double>& break_times() const { return breaks_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<GridPoint>& dense_grid() const { return grid_; }
  const std::vector<double>& arc_table() const { return arc_; }
  double grid_spacing() const { return t_total_ / static_cast<double>(grid_.size() - 1); }

  /// Exact polynomial evaluation. Times outside [0, T] are clamped and flagged.
  PathSample<Dim> sample(double t) const {
    PathSample<Dim> out;
    if (t < 0.0 || t > t_total_ || !std::isfinite(t)) {
      out.clamped = true;
      t = std::isfinite(t) ? std::clamp(t, 0.0, t_total_) : 0.0;
    }
    const std::size_t i = segment_index(t);
    const auto& c = segments_[i].c;
    const double tau = t - breaks_[i];
    out.p = c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
    out.v = c[1] + tau * (2.0 * c[2] + 3.0 * tau * c[3]);
    out.a = 2.0 * c[2] + 6.0 * tau * c[3];
    return out;
  }

  VecD position(double t) const {
    t = std::clamp(t, 0.0, t_total_);
    const std::size_t i = segment_index(t);
    const auto& c = segments_[i].c;
    const double tau = t - breaks_[i];
    return c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
  }

  /// Cumulative arc length at time t, linearly interpolated on the grid table.
  double arc_length(double t) const {
    t = std::clamp(t, 0.0, t_total_);
    const double x = t / grid_spacing();
    const auto j = std::min(static_cast<std::size_t>(x), grid_.size() - 2);
    const double f = x - static_cast<double>(j);
    return arc_[j] + f * (arc_[j + 1] - arc_[j]);
  }

  /// Global argmin over the parameter of |p_ref(s) - q|. Coarse scan of the
  /// dense grid (first minimum wins ties), then golden-section refinement on
  /// the bracketing cells to 1e-9 in parameter.
  double closest_point(const VecD& q) const {
    std::size_t best = 0;
    double best_d2 = (grid_[0].p - q).squaredNorm();
    for (std::size_t j = 1; j < grid_.size(); ++j) {
      const double d2 = (grid_[j].p - q).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    double lo = grid_[best == 0 ? 0 : best - 1].t;
    double hi = grid_[std::min(best + 1, grid_.size() - 1)].t;
    const auto dist2 = [&](double s) { return (position(s) - q).squaredNorm(); };

    constexpr double kInvPhi = 0.6180339887498949;
    constexpr double kTol = 1e-9;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = dist2(x1);
    double f2 = dist2(x2);
    while (hi - lo > kTol) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = dist2(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = dist2(x2);
      }
    }
    double s = 0.5 * (lo + hi);
    // Snap to the bracket ends when the minimum sits on the path boundary.
    for (double cand : {lo, hi}) {
      if (dist2(cand) < dist2(s)) s = cand;
    }
    if (best_d2 < dist2(s)) s = grid_[best].t;
    return std::clamp(s, 0.0, t_total_);
  }

  /// Look-ahead pair at s_c shifted by the time needed to traverse v_LA t_s
  /// under the reference time law, i.e. a shift of t_s. speed_scale < 1
  /// shortens the shift and scales v_LA (local speed cap).
  LookaheadTarget<Dim> lookahead(double s_c, double t_s, double speed_scale = 1.0) const {
    LookaheadTarget<Dim> out;
    out.s_c = std::clamp(s_c, 0.0, t_total_);
    out.s_la = std::min(out.s_c + speed_scale * t_s, t_total_);
    const auto ps = sample(out.s_la);
    out.p = ps.p;
    out.v = speed_scale * ps.v;
    return out;
  }

 private:
  std::size_t segment_index(double t) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    const auto idx = static_cast<std::size_t>(std::distance(breaks_.begin(), it));
    return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, segments_.size() - 1);
  }

  void fit_natural_spline() {
    const std::size_t n = waypoints_.size() - 1;  // segments
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = breaks_[i + 1] - breaks_[i];

    // Second derivatives m[0..n], natural ends m[0] = m[n] = 0. Tridiagonal
    // system on the interior knots, solved with the Thomas algorithm.
    std::vector<VecD> m(n + 1, VecD::Zero());
    if (n >= 2) {
      const std::size_t k = n - 1;
      std::vector<double> diag(k), upper(k), lower(k);
      std::vector<VecD> rhs(k);
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = j + 1;
        lower[j] = h[i - 1];
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        upper[j] = h[i];
        rhs[j] = 6.0 * ((waypoints_[i + 1] - waypoints_[i]) / h[i] -
                        (waypoints_[i] - waypoints_[i - 1]) / h[i - 1]);
      }
      for (std::size_t j = 1; j < k; ++j) {
        const double w = lower[j] / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
      }
      m[k] = rhs[k - 1] / diag[k - 1];
      for (std::size_t j = k - 1; j-- > 0;) {
        m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
      }
    }

    segments_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const VecD& y0 = waypoints_[i];
      const VecD& y1 = waypoints_[i + 1];
      auto& c = segments_[i].c;
      c[0] = y0;
      c[1] = (y1 - y0) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
      c[2] = 0.5 * m[i];
      c[3] = (m[i + 1] - m[i]) / (6.0 * h[i]);
    }
  }

  void build_grid(int resolution) {
    const auto count = static_cast<std::size_t>(resolution);
    grid_.resize(count);
    arc_.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double t = (j + 1 == count) ? t_total_
                                        : t_total_ * static_cast<double>(j) / static_cast<double>(count - 1);
      const auto s = sample(t);
      grid_[j] = GridPoint{t, s.p, s.v, s.a};
      arc_[j] = j == 0 ? 0.0 : arc_[j - 1] + (grid_[j].p - grid_[j - 1].p).norm();
    }
  }

  std::vector<VecD> waypoints_;
  double t_total_;
  std::vector<double> breaks_;
  std::vector<Segment> segments_;
  std::vector<GridPoint> grid_;
  std::vector<double> arc_;
};

/// Convenience: chord-timed natural spline through fresh random waypoints.
inline ReferencePath<2> random_path(std::uint64_t seed, const Workspace& ws, double t_total,
                                    int grid_resolution = ReferencePath<2>::kDefaultGrid) {
  return ReferencePath<2>(generate_waypoints(seed, ws), t_total, grid_resolution);
}

}  // namespace reachtrack

#endif  // REACHTRACK_REF_PATH_HPP
