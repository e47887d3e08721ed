#include <catch2/catch_amalgamated.hpp>

#include "reachtrack/plant.hpp"

using namespace reachtrack;

TEST_CASE("noiseless step follows the Euler update", "[plant]") {
  PlantState<2> x;
  x.v = Vec2(1.0, 0.0);
  const auto next = step<2>(x, Vec2(0.0, 1.0), NoiseSample<2>{}, 0.1);
  CHECK((next.p - Vec2(0.1, 0.005)).norm() <= 1e-15);
  CHECK((next.v - Vec2(1.0, 0.1)).norm() <= 1e-15);
  CHECK(next.t == Catch::Approx(0.1));
}

TEST_CASE("zero command drifts at constant velocity and rest is a fixed point", "[plant]") {
  PlantState<2> x;
  x.p = Vec2(0.3, -0.2);
  x.v = Vec2(0.4, 0.1);
  PlantState<2> y = x;
  for (int k = 0; k < 100; ++k) y = step<2>(y, Vec2::Zero(), NoiseSample<2>{}, 0.01);
  CHECK((y.v - x.v).norm() == 0.0);
  CHECK((y.p - (x.p + 1.0 * x.v)).norm() <= 1e-12);

  PlantState<2> rest;
  rest.p = Vec2(1.0, 2.0);
  const auto z = step<2>(rest, Vec2::Zero(), NoiseSample<2>{}, 0.01);
  CHECK(z.p == rest.p);
  CHECK(z.v == rest.v);
}

TEST_CASE("noise draws stay inside their balls and fill them", "[plant][property]") {
  auto rng = make_rng(99, Stream::noise);
  NoiseBounds nb{0.001, 0.01};
  double max_v = 0.0, max_p = 0.0;
  int inner = 0;
  constexpr int N = 100000;
  for (int i = 0; i < N; ++i) {
    const auto s = sample_noise<2>(rng, nb);
    max_v = std::max(max_v, s.n_v.norm());
    max_p = std::max(max_p, s.n_p.norm());
    if (s.n_v.norm() <= nb.eps_v / std::sqrt(2.0)) ++inner;
  }
  CHECK(max_v <= nb.eps_v);
  CHECK(max_p <= nb.eps_p);
  CHECK(max_v >= 0.99 * nb.eps_v);
  CHECK(max_p >= 0.99 * nb.eps_p);
  // uniform in a disk: half the mass lies inside radius eps / sqrt(2)
  CHECK(std::abs(inner / double(N) - 0.5) <= 0.01);
}

TEST_CASE("noise streams are reproducible", "[plant]") {
  auto a = make_rng(5, Stream::noise);
  auto b = make_rng(5, Stream::noise);
  auto c = make_rng(5, Stream::freeze);
  NoiseBounds nb;
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto sa = sample_noise<2>(a, nb);
    const auto sb = sample_noise<2>(b, nb);
    const auto sc = sample_noise<2>(c, nb);
    CHECK(sa.n_p == sb.n_p);
    CHECK(sa.n_v == sb.n_v);
    differs = differs || sa.n_v != sc.n_v;
  }
  CHECK(differs);
}

TEST_CASE("noise moves the position by at most the one-step buffer", "[plant][property]") {
  auto rng = make_rng(3, Stream::noise);
  NoiseBounds nb{0.001, 0.01};
  const double ts = 0.01;
  PlantState<2> x;
  x.v = Vec2(0.5, -0.2);
  const Vec2 u(1.0, 2.0);
  const auto nominal = step<2>(x, u, NoiseSample<2>{}, ts);
  for (int i = 0; i < 10000; ++i) {
    const auto noisy = step<2>(x, u, sample_noise<2>(rng, nb), ts);
    CHECK((noisy.p - nominal.p).norm() <= nb.position_buffer(ts) * (1.0 + 1e-12));
    CHECK((noisy.v - nominal.v).norm() <= nb.eps_v * ts * (1.0 + 1e-12));
  }
}

TEST_CASE("noise buffer must leave acceleration headroom", "[plant]") {
  Limits lim;
  CHECK(NoiseBounds{}.sigma(lim.t_s) == Catch::Approx(0.21).epsilon(1e-12));
  CHECK_NOTHROW(NoiseBounds{}.validate(lim));
  CHECK_THROWS_AS((NoiseBounds{0.025, 0.01}.validate(lim)), ConfigError);
  CHECK_THROWS_AS((NoiseBounds{-1.0, 0.01}.validate(lim)), ConfigError);
}

TEST_CASE("the plant is dimension generic", "[plant]") {
  PlantState<3> x;
  const auto y = step<3>(x, Vec3(0.0, 0.0, 2.0), NoiseSample<3>{}, 0.1);
  CHECK((y.p - Vec3(0.0, 0.0, 0.01)).norm() <= 1e-15);
  auto rng = make_rng(1, Stream::noise);
  for (int i = 0; i < 1000; ++i) CHECK(uniform_in_ball<3>(rng, 0.5).norm() <= 0.5);
}
