#ifndef REACHTRACK_TRACKER_HPP
#define REACHTRACK_TRACKER_HPP

// Per-sample tracking step: closest point, look-ahead target, margin
// delta = u_req - (a_max - sigma), QP solve with the current weight C, then
// the smoothed KKT-ratio update of C. A freeze brakes to rest and holds.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "reachtrack/core.hpp"
#include "reachtrack/plant.hpp"
#include "reachtrack/qp_solver.hpp"
#include "reachtrack/ref_path.hpp"

namespace reachtrack {

struct WeightPolicy {
  double rho_unreachable = 0.5;
  double beta = 0.2;
  double C_max = 10.0;
  double C_min = 0.0;
  double C_0 = 0.0;

  void validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("policy.beta must lie in (0, 1]");
    if (!(rho_unreachable > 0.0 && rho_unreachable <= 1.0)) {
      throw ConfigError("policy.rho_unreachable must lie in (0, 1]");
    }
    if (!(C_min >= 0.0 && C_min <= C_0 && C_0 <= C_max)) {
      throw ConfigError("policy weights must satisfy 0 <= C_min <= C_0 <= C_max");
    }
  }
};

enum class Mode { tracking, braking, frozen };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::tracking: return "tracking";
    case Mode::braking: return "braking";
    case Mode::frozen: return "frozen";
  }
  return "?";
}

/// Required axial acceleration to land on the look-ahead point in one step.
/// Zero when r = 0.
template <int Dim>
double required_accel(const Vec<Dim>& r, double t_s) {
  return 2.0 * r.norm() / (t_s * t_s);
}

inline double sigma_buffer(const NoiseBounds& nb, double t_s) { return nb.sigma(t_s); }

inline double reach_margin(double u_req, double a_max, double sigma) {
  return std::abs(u_req) - (a_max - sigma);
}

/// C_KKT = t_s |e_p| / (2 |e_v|); empty when |e_v| is numerically zero,
/// meaning the previous weight is kept.
template <int Dim>
std::optional<double> kkt_weight(const Vec<Dim>& e_p, const Vec<Dim>& e_v, double t_s) {
  const double ev = e_v.norm();
  if (ev <= 1e-12) return std::nullopt;
  return t_s * e_p.norm() / (2.0 * ev);
}

inline double update_weight(double C_prev, std::optional<double> C_kkt, double delta, const WeightPolicy& pol) {
  if (!C_kkt) return std::clamp(C_prev, pol.C_min, pol.C_max);
  const double rho = delta > 0.0 ? pol.rho_unreachable : 1.0;
  const double blended = std::min((1.0 - pol.beta) * C_prev + pol.beta * rho * *C_kkt, pol.C_max);
  return std::clamp(blended, pol.C_min, pol.C_max);
}

/// Maximum deceleration along -v, or the exact stop when it fits in one sample.
template <int Dim>
Vec<Dim> brake_command(const Vec<Dim>& v, const Limits& limits) {
  const double speed = v.norm();
  if (speed > limits.a_max * limits.t_s) return -limits.a_max * v / speed;
  return -v / limits.t_s;
}

/// Look-ahead target plus the reachability diagnostics at one state. Shared
/// verbatim by the online tracker, the pure-pursuit harness and the offline
/// screen so their margins agree bit for bit.
template <int Dim>
struct MarginAssessment {
  LookaheadTarget<Dim> target;
  Vec<Dim> r = Vec<Dim>::Zero();
  double u_req = 0.0;
  double delta = 0.0;
  bool reachable = true;
};

/// Optional per-parameter look-ahead scale in (0, 1], applied as a local
/// speed cap. Built by the offline screen.
struct SpeedCapTable {
  double t_total = 0.0;
  std::vector<double> scale;

  double at(double s) const {
    if (scale.empty()) return 1.0;
    if (scale.size() == 1) return scale.front();
    const double x = std::clamp(s / t_total, 0.0, 1.0) * static_cast<double>(scale.size() - 1);
    return scale[static_cast<std::size_t>(std::lround(x))];
  }
};

template <int Dim>
MarginAssessment<Dim> assess_at(const ReferencePath<Dim>& path, double s_c, const Vec<Dim>& p, const Vec<Dim>& v,
                                const Limits& limits, double sigma, double speed_scale = 1.0) {
  MarginAssessment<Dim> m;
  m.target = path.lookahead(s_c, limits.t_s, speed_scale);
  m.r = m.target.p - p - limits.t_s * v;
  m.u_req = required_accel<Dim>(m.r, limits.t_s);
  m.delta = reach_margin(m.u_req, limits.a_max, sigma);
  m.reachable = m.delta <= 0.0;
  return m;
}

template <int Dim>
MarginAssessment<Dim> assess_margin(const ReferencePath<Dim>& path, const Vec<Dim>& p, const Vec<Dim>& v,
                                    const Limits& limits, double sigma, const SpeedCapTable* caps = nullptr) {
  const double s_c = path.closest_point(p);
  return assess_at<Dim>(path, s_c, p, v, limits, sigma, caps ? caps->at(s_c) : 1.0);
}

template <int Dim>
struct StepDecision {
  Vec<Dim> u = Vec<Dim>::Zero();
  double u_req = 0.0;
  double delta = 0.0;
  double C_used = 0.0;
  double C_next = 0.0;
  bool reachable = true;
  Mode mode = Mode::tracking;
  ActiveSet active_set = ActiveSet::none;
  QpStatus qp_status = QpStatus::optimal;
  LookaheadTarget<Dim> target;
  Vec<Dim> e_p = Vec<Dim>::Zero();  // post-solve one-step residuals
  Vec<Dim> e_v = Vec<Dim>::Zero();
};

template <int Dim>
StepDecision<Dim> control_step(const PlantState<Dim>& state, const ReferencePath<Dim>& path, const Limits& limits,
                               const NoiseBounds& nb, const WeightPolicy& pol, double C_prev, bool freeze_active,
                               const SpeedCapTable* caps = nullptr) {
  StepDecision<Dim> d;
  const double sigma = sigma_buffer(nb, limits.t_s);
  const auto m = assess_margin<Dim>(path, state.p, state.v, limits, sigma, caps);
  d.target = m.target;
  d.u_req = m.u_req;
  d.delta = m.delta;
  d.reachable = m.reachable;
  d.C_used = C_prev;
  d.C_next = C_prev;

  if (freeze_active) {
    d.u = brake_command<Dim>(state.v, limits);
    d.mode = state.v.isZero(0.0) ? Mode::frozen : Mode::braking;
    return d;
  }

  const auto sol = solve_step<Dim>(state.p, state.v, m.target, C_prev, limits);
  d.u = sol.u;
  d.active_set = sol.active_set;
  d.qp_status = sol.status;
  d.e_p = sol.e_p;
  d.e_v = sol.e_v;
  if (sol.status == QpStatus::infeasible) {
    d.mode = Mode::braking;
    return d;
  }
  d.C_next = update_weight(C_prev, kkt_weight<Dim>(sol.e_p, sol.e_v, limits.t_s), m.delta, pol);
  return d;
}

/// Owns the adaptive weight across samples for one trial.
template <int Dim>
class Tracker {
 public:
  Tracker(const ReferencePath<Dim>& path, Limits limits, NoiseBounds noise, WeightPolicy policy,
          const SpeedCapTable* caps = nullptr)
      : path_(&path), limits_(limits), noise_(noise), policy_(policy), caps_(caps), C_(policy.C_0) {}

  StepDecision<Dim> step(const PlantState<Dim>& state, bool freeze_active) {
    auto d = control_step<Dim>(state, *path_, limits_, noise_, policy_, C_, freeze_active, caps_);
    C_ = d.C_next;
    return d;
  }

  double weight() const { return C_; }

 private:
  const ReferencePath<Dim>* path_;
  Limits limits_;
  NoiseBounds noise_;
  WeightPolicy policy_;
  const SpeedCapTable* caps_;
  double C_;
};

}  // namespace reachtrack

#endif  // REACHTRACK_TRACKER_HPP
