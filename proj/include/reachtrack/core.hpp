#ifndef REACHTRACK_CORE_HPP
#define REACHTRACK_CORE_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace reachtrack {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

/// Raised when a configuration value violates one of its invariants.
/// The message names the violated invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for file-system failures (unwritable output directory, missing file).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling period and the magnitude envelope on speed and acceleration.
struct Limits {
  double t_s = 0.01;
  double v_max = 1.0;
  double a_max = 5.0;

  void validate() const {
    if (!(t_s > 0.0) || !std::isfinite(t_s)) throw ConfigError("limits.t_s must be > 0");
    if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("limits.v_max must be > 0");
    if (!(a_max > 0.0) || !std::isfinite(a_max)) throw ConfigError("limits.a_max must be > 0");
  }
};

// Independent, reproducible random streams derived from one user seed.
enum class Stream : std::uint32_t { waypoints = 1, freeze = 2, noise = 3 };

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace reachtrack

#endif  // REACHTRACK_CORE_HPP
