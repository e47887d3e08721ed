#ifndef REACHTRACK_BASELINE_PP_HPP
#define REACHTRACK_BASELINE_PP_HPP

#include <algorithm>
#include <cmath>

#include "reachtrack/core.hpp"
#include "reachtrack/plant.hpp"
#include "reachtrack/ref_path.hpp"

namespace reachtrack {

/// Pure-pursuit PD gains. speed_clip enables the one-step speed rescale.
struct PpGains {
  double k_p = 400.0;
  double k_d = 40.0;
  bool speed_clip = true;

  void validate() const {
    if (!(k_p > 0.0)) throw ConfigError("pp_gains.k_p must be > 0");
    if (!(k_d >= 0.0)) throw ConfigError("pp_gains.k_d must be >= 0");
  }
};

template <int Dim>
struct PpCommand {
  Vec<Dim> u = Vec<Dim>::Zero();
  double u_raw_norm = 0.0;
};

/// PD steering toward the look-ahead target; limits are imposed afterwards
/// by radial clipping of the acceleration and, optionally, by rescaling u so
/// the next-step speed stays within v_max.
template <int Dim>
PpCommand<Dim> pp_step(const PlantState<Dim>& state, const LookaheadTarget<Dim>& target, const PpGains& gains,
                       const Limits& limits) {
  PpCommand<Dim> out;
  const Vec<Dim> raw = gains.k_p * (target.p - state.p) + gains.k_d * (target.v - state.v);
  out.u_raw_norm = raw.norm();
  out.u = out.u_raw_norm > limits.a_max ? Vec<Dim>(limits.a_max * raw / out.u_raw_norm) : raw;

  if (!gains.speed_clip) return out;
  const double ts = limits.t_s;
  if ((state.v + ts * out.u).norm() <= limits.v_max) return out;

  // |v + t_s s u|^2 = v_max^2 as a quadratic in the scale s.
  const double qa = ts * ts * out.u.squaredNorm();
  const double qb = 2.0 * ts * state.v.dot(out.u);
  const double qc = state.v.squaredNorm() - limits.v_max * limits.v_max;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (qa > 0.0 && disc >= 0.0) {
    const double sq = std::sqrt(disc);
    const double s_lo = (-qb - sq) / (2.0 * qa);
    const double s_hi = (-qb + sq) / (2.0 * qa);
    const double lo = std::max(s_lo, -1.0);
    const double hi = std::min(s_hi, 1.0);
    if (lo <= hi) {
      out.u *= std::clamp(1.0, lo, hi);
      return out;
    }
  }
  const double speed = state.v.norm();
  out.u = speed > 0.0 ? Vec<Dim>(-limits.a_max * state.v / speed) : Vec<Dim>::Zero();
  return out;
}

}  // namespace reachtrack

#endif  // REACHTRACK_BASELINE_PP_HPP
