#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "reachtrack/ref_path.hpp"
#include "support/oracles.hpp"

using namespace reachtrack;
using Catch::Approx;

namespace {

ReferencePath<2> straight_line(double length, double T, int n_wp = 4) {
  std::vector<Vec2> w;
  for (int i = 0; i <= n_wp; ++i) w.push_back(Vec2(length * i / n_wp, 0.0));
  return ReferencePath<2>(w, T);
}

}  // namespace

TEST_CASE("waypoints start at the origin and lie on the workspace ellipse", "[ref_path]") {
  Workspace ws{2.0, 1.0, 8};
  const auto w = generate_waypoints(42, ws);
  REQUIRE(w.size() == 9);
  CHECK(w.front() == Vec2::Zero());
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double e = std::pow(w[i].x() / 2.0, 2) + std::pow(w[i].y() / 1.0, 2);
    CHECK(e == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("waypoint formula at theta = 0 gives (Lx, 0)", "[ref_path]") {
  // The generator draws theta; substitute theta = 0 into the same formula.
  Workspace ws{2.0, 1.0, 1};
  const double theta = 0.0;
  const Vec2 w(ws.lx * std::cos(theta), ws.ly * std::sin(theta));
  CHECK(w.x() == 2.0);
  CHECK(w.y() == 0.0);
}

TEST_CASE("waypoints are deterministic per seed and differ across seeds", "[ref_path]") {
  Workspace ws;
  CHECK(generate_waypoints(42, ws) == generate_waypoints(42, ws));
  CHECK(generate_waypoints(42, ws) != generate_waypoints(43, ws));
}

TEST_CASE("invalid workspace is rejected", "[ref_path]") {
  CHECK_THROWS_AS(generate_waypoints(1, Workspace{0.0, 1.0, 3}), ConfigError);
  CHECK_THROWS_AS(generate_waypoints(1, Workspace{1.0, 1.0, 1}), ConfigError);
}

TEST_CASE("chord-length timing splits the duration by segment length", "[ref_path]") {
  const std::vector<Vec2> w{{0, 0}, {1, 0}, {1, 3}};
  const auto d = chord_durations<2>(w, 8.0);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == Approx(2.0).epsilon(1e-15));
  CHECK(d[1] == Approx(6.0).epsilon(1e-15));
}

TEST_CASE("coincident consecutive waypoints are a degenerate segment", "[ref_path]") {
  const std::vector<Vec2> w{{0, 0}, {1, 0}, {1, 0}, {2, 1}};
  CHECK_THROWS_AS(ReferencePath<2>(w, 5.0), ConfigError);
  CHECK_THROWS_AS(ReferencePath<2>(std::vector<Vec2>{{0, 0}}, 5.0), ConfigError);
  CHECK_THROWS_AS(ReferencePath<2>(std::vector<Vec2>{{0, 0}, {1, 1}}, 0.0), ConfigError);
}

TEST_CASE("collinear equally spaced waypoints give constant velocity", "[ref_path]") {
  const auto path = straight_line(2.0, 4.0);
  for (const auto& g : path.dense_grid()) {
    CHECK((g.v - Vec2(0.5, 0.0)).norm() <= 1e-8);
    CHECK(g.a.norm() <= 1e-8);
  }
  // t = 0 on a straight line of length L and duration T: v = (L/T) direction.
  CHECK((path.sample(0.0).v - Vec2(0.5, 0.0)).norm() <= 1e-12);
}

TEST_CASE("spline matches an independent dense natural-spline solve", "[ref_path]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto path = random_path(seed, Workspace{}, 10.0);
    const auto ref = oracle::natural_spline(path.waypoints(), path.break_times());
    for (int k = 0; k <= 500; ++k) {
      const double t = 10.0 * k / 500.0;
      const auto s = path.sample(t);
      CHECK((s.p - ref.eval(t, 0)).norm() <= 1e-10);
      CHECK((s.v - ref.eval(t, 1)).norm() <= 1e-9);
      CHECK((s.a - ref.eval(t, 2)).norm() <= 1e-8);
    }
  }
}

TEST_CASE("spline interpolates, is C2, and honours the natural end conditions", "[ref_path][property]") {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const auto path = random_path(seed, Workspace{}, 10.0);
    const auto& br = path.break_times();
    const auto& seg = path.segments();
    for (std::size_t i = 0; i < br.size(); ++i) {
      CHECK((path.sample(br[i]).p - path.waypoints()[i]).norm() <= 1e-10);
    }
    for (std::size_t i = 1; i + 1 < br.size(); ++i) {
      const double h = br[i] - br[i - 1];
      const auto& c = seg[i - 1].c;
      const Vec2 p_left = c[0] + h * (c[1] + h * (c[2] + h * c[3]));
      const Vec2 v_left = c[1] + h * (2.0 * c[2] + 3.0 * h * c[3]);
      const Vec2 a_left = 2.0 * c[2] + 6.0 * h * c[3];
      const auto& d = seg[i].c;
      CHECK((p_left - d[0]).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((v_left - d[1]).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((a_left - 2.0 * d[2]).cwiseAbs().maxCoeff() <= 1e-8);
    }
    CHECK(path.sample(0.0).a.norm() <= 1e-9);
    CHECK(path.sample(10.0).a.norm() <= 1e-9);
    double sum = 0.0;
    for (double d : chord_durations<2>(path.waypoints(), 10.0)) sum += d;
    CHECK(std::abs(sum - 10.0) <= 1e-12 * 10.0);
    CHECK(br.front() == 0.0);
    CHECK(br.back() == 10.0);
  }
}

TEST_CASE("sample hits waypoints at breakpoints and clamps outside the domain", "[ref_path]") {
  const auto path = random_path(7, Workspace{}, 10.0);
  CHECK((path.sample(10.0).p - path.waypoints().back()).norm() <= 1e-10);
  CHECK_FALSE(path.sample(3.0).clamped);
  const auto lo = path.sample(-1.0);
  const auto hi = path.sample(11.0);
  CHECK(lo.clamped);
  CHECK(hi.clamped);
  CHECK((lo.p - path.sample(0.0).p).norm() == 0.0);
  CHECK((hi.p - path.sample(10.0).p).norm() == 0.0);
}

TEST_CASE("dense grid and arc table are consistent", "[ref_path]") {
  const auto path = random_path(3, Workspace{}, 10.0, 500);
  const auto& g = path.dense_grid();
  REQUIRE(g.size() == 500);
  CHECK(g.front().t == 0.0);
  CHECK(g.back().t == 10.0);
  const auto& arc = path.arc_table();
  for (std::size_t j = 1; j < arc.size(); ++j) CHECK(arc[j] >= arc[j - 1]);
  CHECK(path.arc_length(10.0) == arc.back());
  CHECK(path.arc_length(0.0) == 0.0);
}

TEST_CASE("closest point recovers on-path and perpendicular-foot queries", "[ref_path]") {
  const auto line = straight_line(2.0, 4.0);
  for (double t0 : {0.3, 1.7, 2.9}) {
    CHECK(line.closest_point(line.sample(t0).p) == Approx(t0).margin(1e-6));
    const Vec2 off = line.sample(t0).p + Vec2(0.0, 0.37);
    CHECK(line.closest_point(off) == Approx(t0).margin(1e-6));
  }
  const auto path = random_path(11, Workspace{}, 10.0);
  for (double t0 : {0.5, 2.2, 6.1, 9.4}) {
    CHECK(path.closest_point(path.sample(t0).p) == Approx(t0).margin(1e-6));
  }
}

TEST_CASE("closest point matches a brute-force argmin within one grid cell", "[ref_path][oracle]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> q(-0.7, 0.7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto path = random_path(1000 + trial, Workspace{}, 10.0);
    const Vec2 query(q(rng), q(rng));
    const double s = path.closest_point(query);
    double best = std::numeric_limits<double>::infinity(), s_bf = 0.0;
    constexpr int N = 1'000'000;
    for (int k = 0; k <= N; ++k) {
      const double t = 10.0 * k / N;
      const double d = (path.position(t) - query).squaredNorm();
      if (d < best) {
        best = d;
        s_bf = t;
      }
    }
    CHECK(std::abs(s - s_bf) <= path.grid_spacing());
    // The refined point is never farther than the brute-force one.
    CHECK((path.position(s) - query).squaredNorm() <= best + 1e-15);
  }
}

TEST_CASE("lookahead is a time shift clamped at the path end", "[ref_path]") {
  const auto line = straight_line(2.0, 4.0);
  const double ts = 0.01;
  const auto la = line.lookahead(1.0, ts);
  CHECK((la.p - (line.sample(1.0).p + Vec2(0.5, 0.0) * ts)).norm() <= 1e-12);
  CHECK(la.s_la == Approx(1.0 + ts));

  const auto end = line.lookahead(4.0, ts);
  CHECK(end.s_la == 4.0);
  CHECK((end.p - line.waypoints().back()).norm() <= 1e-12);
  CHECK((end.v - line.sample(4.0).v).norm() == 0.0);

  const auto zero = line.lookahead(2.5, 0.0);
  CHECK((zero.p - line.sample(2.5).p).norm() == 0.0);

  const auto capped = line.lookahead(1.0, ts, 0.5);
  CHECK(capped.s_la == Approx(1.0 + 0.5 * ts));
  CHECK((capped.v - 0.5 * line.sample(1.0 + 0.5 * ts).v).norm() <= 1e-15);
}

TEST_CASE("paths are bit-identical per seed", "[ref_path]") {
  const auto a = random_path(5, Workspace{}, 10.0);
  const auto b = random_path(5, Workspace{}, 10.0);
  REQUIRE(a.segments().size() == b.segments().size());
  for (std::size_t i = 0; i < a.segments().size(); ++i) {
    for (int k = 0; k < 4; ++k) CHECK(a.segments()[i].c[k] == b.segments()[i].c[k]);
  }
}

TEST_CASE("the spline is dimension generic", "[ref_path]") {
  const std::vector<Vec3> w{{0, 0, 0}, {1, 0, 1}, {1, 2, 0}, {0, 1, 1}};
  const ReferencePath<3> p(w, 6.0, 600);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK((p.sample(p.break_times()[i]).p - w[i]).norm() <= 1e-10);
  CHECK(p.closest_point(p.sample(2.5).p) == Approx(2.5).margin(1e-6));
}
