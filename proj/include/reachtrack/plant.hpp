#ifndef REACHTRACK_PLANT_HPP
#define REACHTRACK_PLANT_HPP

#include <cmath>
#include <random>

#include "reachtrack/core.hpp"

namespace reachtrack {

/// Almost-sure bounds on the position-rate and acceleration disturbances.
struct NoiseBounds {
  double eps_p = 1e-3;
  double eps_v = 1e-2;

  /// Acceleration headroom reserved for the worst one-step noise shift.
  double sigma(double t_s) const { return 2.0 * eps_p / t_s + eps_v; }
  /// Worst-case one-step position displacement caused by noise.
  double position_buffer(double t_s) const { return eps_p * t_s + 0.5 * eps_v * t_s * t_s; }

  void validate(const Limits& limits) const {
    if (!(eps_p >= 0.0)) throw ConfigError("noise.eps_p must be >= 0");
    if (!(eps_v >= 0.0)) throw ConfigError("noise.eps_v must be >= 0");
    if (!(sigma(limits.t_s) < limits.a_max)) {
      throw ConfigError("noise buffer sigma = 2 eps_p / t_s + eps_v must be < a_max");
    }
  }
};

template <int Dim>
struct PlantState {
  Vec<Dim> p = Vec<Dim>::Zero();
  Vec<Dim> v = Vec<Dim>::Zero();
  double t = 0.0;
  bool frozen = false;

  bool operator==(const PlantState&) const = default;
};

template <int Dim>
struct NoiseSample {
  Vec<Dim> n_p = Vec<Dim>::Zero();
  Vec<Dim> n_v = Vec<Dim>::Zero();
};

/// Uniform draw from the closed ball of the given radius: Gaussian direction,
/// radius scaled by U^(1/Dim).
template <int Dim, class Rng>
Vec<Dim> uniform_in_ball(Rng& rng, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec<Dim> dir;
  double n = 0.0;
  do {
    for (int i = 0; i < Dim; ++i) dir[i] = gauss(rng);
    n = dir.norm();
  } while (n == 0.0);
  const double rad = radius * std::pow(unit(rng), 1.0 / Dim);
  return (rad / n) * dir;
}

template <int Dim, class Rng>
Vec<Dim> uniform_on_sphere(Rng& rng, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec<Dim> dir;
  double n = 0.0;
  do {
    for (int i = 0; i < Dim; ++i) dir[i] = gauss(rng);
    n = dir.norm();
  } while (n == 0.0);
  return (radius / n) * dir;
}

template <int Dim, class Rng>
NoiseSample<Dim> sample_noise(Rng& rng, const NoiseBounds& nb) {
  NoiseSample<Dim> s;
  s.n_p = uniform_in_ball<Dim>(rng, nb.eps_p);
  s.n_v = uniform_in_ball<Dim>(rng, nb.eps_v);
  return s;
}

/// Forward-Euler double integrator:
///   v' = v + (u + n_v) t_s
///   p' = p + (v + n_p) t_s + 1/2 (u + n_v) t_s^2
template <int Dim>
PlantState<Dim> step(const PlantState<Dim>& x, const Vec<Dim>& u, const NoiseSample<Dim>& ns, double t_s) {
  PlantState<Dim> next = x;
  const Vec<Dim> acc = u + ns.n_v;
  next.v = x.v + acc * t_s;
  next.p = x.p + (x.v + ns.n_p) * t_s + 0.5 * acc * t_s * t_s;
  next.t = x.t + t_s;
  return next;
}

}  // namespace reachtrack

#endif  // REACHTRACK_PLANT_HPP
