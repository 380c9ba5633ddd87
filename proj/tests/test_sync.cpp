#include "stskit/sync.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace stskit;
using dsp::UniformSignal;

namespace {

// smooth band-limited random signal for lag experiments; random
// incommensurate frequencies keep it aperiodic over the window
UniformSignal smooth_random(uint64_t seed, double fs, double dur) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  std::uniform_real_distribution<double> uf(0.05, 0.7);
  struct Cmp {
    double f, a, ph;
  };
  std::vector<Cmp> comps;
  for (int k = 1; k <= 6; ++k)
    comps.push_back({uf(rng), 10.0 / k, u(rng)});
  UniformSignal s;
  s.t0 = 0.0;
  s.dt = 1.0 / fs;
  s.v.resize(size_t(dur * fs));
  for (size_t i = 0; i < s.v.size(); ++i) {
    double acc = 0.0;
    for (const auto& c : comps) acc += c.a * std::sin(2 * kPi * c.f * i * s.dt + c.ph);
    s.v[i] = acc;
  }
  return s;
}

UniformSignal shifted_copy(const UniformSignal& s, double delta) {
  UniformSignal out = s;
  out.t0 += delta;
  return out;
}

}  // namespace

TEST_CASE("reconstruct_wearable_times: arithmetic and preconditions") {
  const auto tb = sync::reconstruct_wearable_times(1000.0, 1000, 100.0);
  CHECK(tb.t0 == Catch::Approx(990.01).margin(1e-9));
  CHECK(tb.dt == Catch::Approx(0.01).margin(1e-12));
  CHECK(tb.n == 1000);

  const auto tb2 = sync::reconstruct_wearable_times(50.0, 2, 1.0);
  CHECK(tb2.t0 == Catch::Approx(49.0).margin(1e-12));

  CHECK_THROWS_AS(sync::reconstruct_wearable_times(0.0, 10, 0.0),
                  std::invalid_argument);
}

TEST_CASE("common_range over overlapping and disjoint bases") {
  sync::TimeBase a{0.0, 1.0, 11};   // [0, 10]
  sync::TimeBase b{2.0, 1.0, 11};   // [2, 12]
  const auto [lo, hi] = sync::common_range({a, b});
  CHECK(lo == Catch::Approx(2.0));
  CHECK(hi == Catch::Approx(10.0));

  const auto [lo2, hi2] = sync::common_range({a, a});
  CHECK(lo2 == Catch::Approx(0.0));
  CHECK(hi2 == Catch::Approx(10.0));

  sync::TimeBase c{0.0, 1.0, 2};  // [0, 1]
  sync::TimeBase d{2.0, 1.0, 2};  // [2, 3]
  CHECK_THROWS_AS(sync::common_range({c, d}), std::invalid_argument);
  CHECK_THROWS_AS(sync::common_range({a}), std::invalid_argument);
}

TEST_CASE("apply_lag shifts the origin and inverts cleanly") {
  sync::TimeBase b{10.0, 0.05, 100};
  CHECK(sync::apply_lag(b, 0.0).t0 == Catch::Approx(10.0));
  CHECK(sync::apply_lag(b, 0.7).t0 == Catch::Approx(10.7));
  const auto fwd = sync::apply_lag(b, 1.3);
  const auto back = sync::apply_lag(fwd, -1.3);
  CHECK(back.t0 == Catch::Approx(b.t0));
  CHECK(back.dt == b.dt);
  CHECK(back.n == b.n);
}

TEST_CASE("estimate_lag: identical signals give zero lag, rho one") {
  const auto s = smooth_random(1, 20, 30);
  const auto r = sync::estimate_lag(s, s, 5.0);
  CHECK(r.lag_s == Catch::Approx(0.0).margin(1e-9));
  CHECK(r.peak_rho == Catch::Approx(1.0).margin(1e-12));
  CHECK_FALSE(r.flipped);
}

TEST_CASE("estimate_lag: constructed shift of 0.70 s at dt = 0.05") {
  const auto s = smooth_random(2, 20, 40);
  const auto r = sync::estimate_lag(s, shifted_copy(s, 0.70), 5.0);
  CHECK(std::abs(r.lag_s - 0.70) < 0.005);  // dt/10 with refinement
}

TEST_CASE("estimate_lag: negated signal flagged as flipped with rho -1") {
  const auto s = smooth_random(3, 20, 30);
  auto neg = s;
  for (auto& v : neg.v) v = -v;
  const auto r = sync::estimate_lag(s, neg, 5.0);
  CHECK(r.flipped);
  CHECK(r.peak_rho == Catch::Approx(-1.0).margin(1e-9));
  CHECK(std::abs(r.lag_s) < 0.05);
}

TEST_CASE("estimate_lag: random shifts recovered within dt/10") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 10; ++i) {
    const double delta = u(rng);
    const auto s = smooth_random(100 + uint64_t(i), 20, 60);
    const auto r = sync::estimate_lag(s, shifted_copy(s, delta), 10.0);
    CHECK(std::abs(r.lag_s - delta) < 0.005);
  }
}

TEST_CASE("estimate_lag is antisymmetric") {
  const auto a = smooth_random(7, 20, 40);
  const auto b = shifted_copy(smooth_random(7, 20, 40), 1.7);
  const auto ab = sync::estimate_lag(a, b, 5.0);
  const auto ba = sync::estimate_lag(b, a, 5.0);
  CHECK(std::abs(ab.lag_s + ba.lag_s) < 0.005);
}

TEST_CASE("estimate_lag preconditions") {
  const auto s = smooth_random(8, 20, 30);
  auto other = s;
  other.dt *= 2.0;
  CHECK_THROWS_AS(sync::estimate_lag(s, other, 5.0), std::invalid_argument);

  auto brief = smooth_random(9, 20, 4);  // < 5 s overlap
  CHECK_THROWS_AS(sync::estimate_lag(brief, brief, 1.0), std::invalid_argument);
}
