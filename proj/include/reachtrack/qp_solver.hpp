#ifndef REACHTRACK_QP_SOLVER_HPP
#define REACHTRACK_QP_SOLVER_HPP

// One-step QP:
//   min |r - t_s^2/2 u|^2 + C |d_v - t_s u|^2
//   s.t. |u| <= a_max, |v_k + t_s u| <= v_max
// J is isotropic in u, so the answer is the projection of the unconstrained
// minimizer onto the intersection of two balls. Closed form, with Dykstra
// as a fallback for degenerate geometry.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "reachtrack/core.hpp"
#include "reachtrack/ref_path.hpp"

namespace reachtrack {

enum class ActiveSet { none, accel, speed, both };
enum class QpStatus { optimal, fallback, infeasible };

inline const char* to_string(ActiveSet a) {
  switch (a) {
    case ActiveSet::none: return "none";
    case ActiveSet::accel: return "accel";
    case ActiveSet::speed: return "speed";
    case ActiveSet::both: return "both";
  }
  return "?";
}

template <int Dim>
struct QpInput {
  Vec<Dim> r = Vec<Dim>::Zero();    // p_LA - p_k - t_s v_k
  Vec<Dim> d_v = Vec<Dim>::Zero();  // v_LA - v_k
  Vec<Dim> v_k = Vec<Dim>::Zero();
  double C = 0.0;
};

template <int Dim>
struct QpSolution {
  Vec<Dim> u = Vec<Dim>::Zero();
  ActiveSet active_set = ActiveSet::none;
  // Multipliers of the constraints |u|^2 <= a^2 and |v + t_s u|^2 <= v^2.
  double lambda_accel = 0.0;
  double lambda_speed = 0.0;
  double objective = 0.0;
  QpStatus status = QpStatus::optimal;
  int iterations = 0;
  Vec<Dim> e_p = Vec<Dim>::Zero();
  Vec<Dim> e_v = Vec<Dim>::Zero();
};

namespace qp_detail {

constexpr double kFeasTol = 1e-12;
constexpr double kProjTol = 1e-12;
constexpr int kMaxIter = 200;

template <int Dim>
Vec<Dim> project_ball(const Vec<Dim>& z, const Vec<Dim>& center, double radius) {
  const Vec<Dim> d = z - center;
  const double n = d.norm();
  if (n <= radius) return z;
  return center + (radius / n) * d;
}

template <int Dim>
bool in_ball(const Vec<Dim>& z, const Vec<Dim>& center, double radius) {
  return (z - center).norm() <= radius * (1.0 + kFeasTol);
}

// Some unit vector orthogonal to axis (axis assumed unit length).
template <int Dim>
Vec<Dim> any_orthogonal(const Vec<Dim>& axis) {
  Eigen::Index k = 0;
  axis.cwiseAbs().minCoeff(&k);
  Vec<Dim> e = Vec<Dim>::Zero();
  e[k] = 1.0;
  e -= e.dot(axis) * axis;
  return e.normalized();
}

}  // namespace qp_detail

/// u*(C) = (r + (2C/t_s) d_v) / (t_s^2/2 + 2C).
template <int Dim>
Vec<Dim> unconstrained_minimizer(const QpInput<Dim>& in, const Limits& limits) {
  const double ts = limits.t_s;
  return (in.r + (2.0 * in.C / ts) * in.d_v) / (0.5 * ts * ts + 2.0 * in.C);
}

template <int Dim>
double objective(const QpInput<Dim>& in, const Limits& limits, const Vec<Dim>& u) {
  const double ts = limits.t_s;
  return (in.r - 0.5 * ts * ts * u).squaredNorm() + in.C * (in.d_v - ts * u).squaredNorm();
}

template <int Dim>
Vec<Dim> gradient(const QpInput<Dim>& in, const Limits& limits, const Vec<Dim>& u) {
  const double ts = limits.t_s;
  return -ts * ts * (in.r - 0.5 * ts * ts * u) - 2.0 * in.C * ts * (in.d_v - ts * u);
}

/// Euclidean projection of u_star onto {|u| <= a_max} ∩ {|v_k + t_s u| <= v_max}.
/// Multipliers are reported for the objective |u - u_star|^2; solve() rescales
/// them to the tracking cost. An empty feasible set yields the max-braking
/// command with status infeasible.
template <int Dim>
QpSolution<Dim> project_feasible(const Vec<Dim>& u_star, const Vec<Dim>& v_k, const Limits& limits) {
  using namespace qp_detail;
  using V = Vec<Dim>;
  QpSolution<Dim> out;

  const double a = limits.a_max;
  const double ts = limits.t_s;
  const V center = -v_k / ts;
  const double rho = limits.v_max / ts;
  const V zero = V::Zero();
  const double dist = center.norm();

  if (v_k.norm() > (limits.v_max + a * ts) * (1.0 + kFeasTol)) {
    out.status = QpStatus::infeasible;
    out.active_set = ActiveSet::accel;
    out.u = -a * v_k.normalized();
    return out;
  }

  const bool in_a = in_ball<Dim>(u_star, zero, a);
  const bool in_v = in_ball<Dim>(u_star, center, rho);
  if (in_a && in_v) {
    out.u = u_star;
    return out;
  }

  bool done = false;
  if (!in_a) {
    const V pa = project_ball<Dim>(u_star, zero, a);
    if (in_ball<Dim>(pa, center, rho)) {
      out.u = pa;
      out.active_set = ActiveSet::accel;
      done = true;
    }
  }
  if (!done && !in_v) {
    const V pv = project_ball<Dim>(u_star, center, rho);
    if (in_ball<Dim>(pv, zero, a)) {
      out.u = pv;
      out.active_set = ActiveSet::speed;
      done = true;
    }
  }

  // Both spheres active: project onto their intersection (a circle in 3D,
  // two points in 2D), which lies in the hyperplane orthogonal to c at
  // offset x0 from the origin with in-plane radius h.
  if (!done && dist > 0.0) {
    const V axis = center / dist;
    const double x0 = (a * a - rho * rho + dist * dist) / (2.0 * dist);
    const double h2 = a * a - x0 * x0;
    if (h2 < 0.0 && dist >= rho) {
      // balls touch from outside (|v| at v_max + a t_s up to rounding): one feasible point
      out.u = a * axis;
      out.active_set = ActiveSet::both;
      done = true;
    } else if (h2 >= 0.0) {
      V perp = u_star - u_star.dot(axis) * axis;
      const double pn = perp.norm();
      perp = pn > 0.0 ? V(perp / pn) : any_orthogonal<Dim>(axis);
      const V u = x0 * axis + std::sqrt(h2) * perp;
      if (in_ball<Dim>(u, zero, a) && in_ball<Dim>(u, center, rho)) {
        out.u = u;
        out.active_set = ActiveSet::both;
        done = true;
      }
    }
  }

  if (!done) {
    // Dykstra: converges to the projection onto the intersection.
    V x = u_star, p = V::Zero(), q = V::Zero();
    int it = 0;
    for (; it < kMaxIter; ++it) {
      const V y = project_ball<Dim>(x + p, zero, a);
      p = x + p - y;
      const V xn = project_ball<Dim>(y + q, center, rho);
      q = y + q - xn;
      const double step = (xn - x).norm();
      x = xn;
      if (step <= kProjTol * (1.0 + x.norm())) break;
    }
    out.u = project_ball<Dim>(x, zero, a);
    out.iterations = it + 1;
    out.status = QpStatus::fallback;
    const bool on_a = std::abs(out.u.norm() - a) <= 1e-9 * a;
    const bool on_v = std::abs((out.u - center).norm() - rho) <= 1e-9 * rho;
    out.active_set = on_a && on_v ? ActiveSet::both
                     : on_a       ? ActiveSet::accel
                     : on_v       ? ActiveSet::speed
                                  : ActiveSet::none;
  }

  if (out.active_set == ActiveSet::both) {
    // u_star - u = mu_a u + mu_v t_s^2 (u - c), least squares over the two normals.
    Eigen::Matrix<double, Dim, 2> A;
    A.col(0) = out.u;
    A.col(1) = ts * ts * (out.u - center);
    const Eigen::Vector2d mu = (A.transpose() * A).ldlt().solve(A.transpose() * (u_star - out.u));
    out.lambda_accel = std::max(0.0, mu[0]);
    out.lambda_speed = std::max(0.0, mu[1]);
  } else if (out.active_set == ActiveSet::accel) {
    out.lambda_accel = std::max(0.0, u_star.norm() / a - 1.0);
  } else if (out.active_set == ActiveSet::speed) {
    out.lambda_speed = std::max(0.0, ((u_star - center).norm() / rho - 1.0) / (ts * ts));
  }
  return out;
}

/// Full solve: minimizer, projection, multipliers in cost units, residuals.
template <int Dim>
QpSolution<Dim> solve(const QpInput<Dim>& in, const Limits& limits) {
  const double ts = limits.t_s;
  auto sol = project_feasible<Dim>(unconstrained_minimizer<Dim>(in, limits), in.v_k, limits);
  // J = alpha |u - u*|^2 + const with alpha = t_s^4/4 + C t_s^2.
  const double alpha = 0.25 * ts * ts * ts * ts + in.C * ts * ts;
  sol.lambda_accel *= alpha;
  sol.lambda_speed *= alpha;
  sol.objective = objective<Dim>(in, limits, sol.u);
  sol.e_p = in.r - 0.5 * ts * ts * sol.u;
  sol.e_v = in.d_v - ts * sol.u;
  return sol;
}

/// Builds (r, d_v) from the Euler one-step prediction and solves.
template <int Dim>
QpSolution<Dim> solve_step(const Vec<Dim>& p_k, const Vec<Dim>& v_k, const LookaheadTarget<Dim>& target,
                           double C, const Limits& limits) {
  QpInput<Dim> in;
  in.r = target.p - p_k - limits.t_s * v_k;
  in.d_v = target.v - v_k;
  in.v_k = v_k;
  in.C = C;
  return solve<Dim>(in, limits);
}

}  // namespace reachtrack

#endif  // REACHTRACK_QP_SOLVER_HPP
