#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "reachtrack/baseline_pp.hpp"
#include "reachtrack/plant.hpp"
#include "reachtrack/ref_path.hpp"

using namespace reachtrack;

TEST_CASE("zero tracking error gives zero command", "[pp]") {
  PlantState<2> x;
  x.p = Vec2(0.2, 0.1);
  x.v = Vec2(0.3, 0.0);
  LookaheadTarget<2> t;
  t.p = x.p;
  t.v = x.v;
  const auto cmd = pp_step<2>(x, t, PpGains{}, Limits{});
  CHECK(cmd.u.norm() == 0.0);
  CHECK(cmd.u_raw_norm == 0.0);
}

TEST_CASE("raw command is clipped radially to the acceleration limit", "[pp]") {
  PlantState<2> x;
  LookaheadTarget<2> t;
  t.p = Vec2(0.25, 0.0);  // k_p * 0.25 = 100
  const auto cmd = pp_step<2>(x, t, PpGains{}, Limits{});
  CHECK(cmd.u_raw_norm == Catch::Approx(100.0));
  CHECK((cmd.u - Vec2(5.0, 0.0)).norm() <= 1e-12);
}

TEST_CASE("speed clip rescales to keep the next speed within v_max", "[pp]") {
  PlantState<2> x;
  x.v = Vec2(0.99, 0.0);
  LookaheadTarget<2> t;
  t.p = Vec2(0.1, 0.0);
  t.v = Vec2(1.0, 0.0);
  const auto cmd = pp_step<2>(x, t, PpGains{}, Limits{});
  CHECK((x.v + 0.01 * cmd.u).norm() <= 1.0 + 1e-12);
  PpGains off;
  off.speed_clip = false;
  CHECK((x.v + 0.01 * pp_step<2>(x, t, off, Limits{}).u).norm() > 1.0);
}

TEST_CASE("limits hold for arbitrary states", "[pp][property]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Limits lim;
  for (int i = 0; i < 10000; ++i) {
    PlantState<2> x;
    x.p = Vec2(U(rng), U(rng));
    x.v = 0.7 * Vec2(U(rng), U(rng));
    LookaheadTarget<2> t;
    t.p = x.p + 0.05 * Vec2(U(rng), U(rng));
    t.v = Vec2(U(rng), U(rng));
    const auto cmd = pp_step<2>(x, t, PpGains{}, lim);
    CHECK(cmd.u.norm() <= lim.a_max * (1.0 + 1e-12));
    CHECK((x.v + lim.t_s * cmd.u).norm() <= lim.v_max * (1.0 + 1e-12));
  }
}

TEST_CASE("a tight loop drives the raw command past the limit", "[pp]") {
  std::vector<Vec2> w;
  for (int i = 0; i <= 12; ++i) {
    const double th = 2.0 * std::numbers::pi * i / 12.0;
    w.push_back(Vec2(0.2 * std::sin(th), 0.2 - 0.2 * std::cos(th)));
  }
  const ReferencePath<2> path(w, 1.5);
  const Limits lim;
  PlantState<2> x;
  double max_raw = 0.0;
  for (int k = 0; k < 150; ++k) {
    const auto t = path.lookahead(path.closest_point(x.p), lim.t_s);
    const auto cmd = pp_step<2>(x, t, PpGains{}, lim);
    max_raw = std::max(max_raw, cmd.u_raw_norm);
    CHECK(cmd.u.norm() <= lim.a_max * (1.0 + 1e-12));
    x = step<2>(x, cmd.u, NoiseSample<2>{}, lim.t_s);
  }
  CHECK(max_raw > lim.a_max);
}

TEST_CASE("gains are validated", "[pp]") {
  CHECK_THROWS_AS((PpGains{0.0, 1.0, true}.validate()), ConfigError);
  CHECK_THROWS_AS((PpGains{1.0, -1.0, true}.validate()), ConfigError);
  CHECK_NOTHROW(PpGains{}.validate());
}
