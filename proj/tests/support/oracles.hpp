#ifndef REACHTRACK_TESTS_ORACLES_HPP
#define REACHTRACK_TESTS_ORACLES_HPP

// Reference computations written independently of the library: a dense
// global spline fit, a brute-force QP over a polar grid, straight-from-the-
// formula costs. Tests compare the library against these.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Vec2 = Eigen::Vector2d;

// Natural cubic spline by one dense 4n x 4n solve per axis. Unknowns are the
// monomial coefficients of each segment in local time.
struct DenseSpline {
  std::vector<double> breaks;
  std::vector<std::array<Vec2, 4>> coef;

  Vec2 eval(double t, int deriv = 0) const {
    std::size_t i = 0;
    while (i + 1 < coef.size() && t >= breaks[i + 1]) ++i;
    const double x = t - breaks[i];
    const auto& c = coef[i];
    if (deriv == 0) return c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
    if (deriv == 1) return c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x;
    return 2.0 * c[2] + 6.0 * c[3] * x;
  }
};

inline DenseSpline natural_spline(const std::vector<Vec2>& w, const std::vector<double>& breaks) {
  const int n = static_cast<int>(w.size()) - 1;
  DenseSpline out;
  out.breaks = breaks;
  out.coef.resize(n);
  for (int axis = 0; axis < 2; ++axis) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(4 * n);
    int row = 0;
    for (int i = 0; i < n; ++i) {
      const double h = breaks[i + 1] - breaks[i];
      A(row, 4 * i) = 1.0;
      b(row++) = w[i][axis];
      for (int k = 0; k < 4; ++k) A(row, 4 * i + k) = std::pow(h, k);
      b(row++) = w[i + 1][axis];
    }
    for (int i = 0; i + 1 < n; ++i) {
      const double h = breaks[i + 1] - breaks[i];
      // first derivative continuity
      A(row, 4 * i + 1) = 1.0;
      A(row, 4 * i + 2) = 2.0 * h;
      A(row, 4 * i + 3) = 3.0 * h * h;
      A(row++, 4 * (i + 1) + 1) = -1.0;
      // second derivative continuity
      A(row, 4 * i + 2) = 2.0;
      A(row, 4 * i + 3) = 6.0 * h;
      A(row++, 4 * (i + 1) + 2) = -2.0;
    }
    A(row++, 2) = 2.0;
    const double hn = breaks[n] - breaks[n - 1];
    A(row, 4 * (n - 1) + 2) = 2.0;
    A(row++, 4 * (n - 1) + 3) = 6.0 * hn;
    const Eigen::VectorXd x = A.fullPivLu().solve(b);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < 4; ++k) out.coef[i][k][axis] = x(4 * i + k);
    }
  }
  return out;
}

// J(u) written straight from the cost definition.
inline double qp_cost(const Vec2& r, const Vec2& dv, double C, double ts, const Vec2& u) {
  const Vec2 ep = r - 0.5 * ts * ts * u;
  const Vec2 ev = dv - ts * u;
  return ep.dot(ep) + C * ev.dot(ev);
}

inline bool qp_feasible(const Vec2& u, const Vec2& v, double ts, double a, double vmax, double slack = 0.0) {
  return u.norm() <= a * (1.0 + slack) && (v + ts * u).norm() <= vmax * (1.0 + slack);
}

struct BruteResult {
  Vec2 u = Vec2::Zero();
  double J = std::numeric_limits<double>::infinity();
  std::size_t candidates = 0;
};

// Polar grid over the acceleration disk (plus its boundary circle and the
// speed circle, where constrained optima live), keeping feasible points,
// followed by local zoom rounds around the incumbent.
inline BruteResult brute_force_qp(const Vec2& r, const Vec2& dv, const Vec2& v, double C, double ts, double a,
                                  double vmax, int radial = 250, int angular = 400) {
  BruteResult best;
  auto consider = [&](const Vec2& u) {
    ++best.candidates;
    if (!qp_feasible(u, v, ts, a, vmax, 1e-12)) return;
    const double J = qp_cost(r, dv, C, ts, u);
    if (J < best.J) {
      best.J = J;
      best.u = u;
    }
  };
  const double pi2 = 2.0 * std::numbers::pi;
  for (int i = 0; i <= radial; ++i) {
    const double rad = a * static_cast<double>(i) / radial;
    for (int j = 0; j < angular; ++j) {
      const double th = pi2 * j / angular;
      consider(Vec2(rad * std::cos(th), rad * std::sin(th)));
    }
  }
  const Vec2 c = -v / ts;
  const double rho = vmax / ts;
  for (int j = 0; j < 4 * angular; ++j) {
    const double th = pi2 * j / (4 * angular);
    consider(Vec2(a * std::cos(th), a * std::sin(th)));
    consider(c + rho * Vec2(std::cos(th), std::sin(th)));
  }
  if (!std::isfinite(best.J)) return best;

  // Zoom: square grid around the incumbent, shrinking each round. The
  // boundary arcs are re-sampled near the incumbent as well.
  double h = 2.0 * a / radial;
  for (int round = 0; round < 40; ++round) {
    const Vec2 center = best.u;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) consider(center + h * Vec2(i, j) / 10.0);
    }
    const double th0 = std::atan2(center.y(), center.x());
    const Vec2 dc = center - c;
    const double th1 = std::atan2(dc.y(), dc.x());
    for (int k = -20; k <= 20; ++k) {
      const double dth = h / a * k / 10.0;
      consider(a * Vec2(std::cos(th0 + dth), std::sin(th0 + dth)));
      const double dth2 = h / rho * k / 10.0;
      consider(c + rho * Vec2(std::cos(th1 + dth2), std::sin(th1 + dth2)));
    }
    h *= 0.5;
  }
  return best;
}

}  // namespace oracle

#endif  // REACHTRACK_TESTS_ORACLES_HPP
