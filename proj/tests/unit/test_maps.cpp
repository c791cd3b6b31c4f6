#include <cmath>
#include <limits>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "doctest.h"
#include "chaosim/maps.hpp"
#include "chaosim/counter_rng.hpp"

using namespace chaosim;

namespace {

MapParams fig1_params() {
  MapParams p;
  p.C = 1.0 / 3.0;
  p.K = 95.0 / kTwoPi;
  p.omega = 1.0;
  p.nu = 1.0 / 2.1;
  return p;
}

}  // namespace

TEST_CASE("logistic_step fixed points and maximum") {
  CHECK(logistic_step(0.0) == 0.0);
  CHECK(logistic_step(0.5) == 1.0);
  CHECK(logistic_step(0.75) == 0.75);
  CHECK(logistic_step(1.0) == 0.0);
}

TEST_CASE("logistic_step rejects values outside the unit interval") {
  CHECK_THROWS_AS(logistic_step(-1e-12), std::domain_error);
  CHECK_THROWS_AS(logistic_step(1.0 + 1e-12), std::domain_error);
  CHECK_THROWS_AS(logistic_step(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("time_step uses floor reduction") {
  CHECK(time_step(0.0, 0.0) == 0.0);
  CHECK(time_step(0.0, 1.0) == doctest::Approx(0.41421356237309515).epsilon(1e-15));
  // 40-digit evaluation: 0.6071067811865475466...
  CHECK(time_step(0.9, 0.5) == doctest::Approx(0.6071067811865475466).epsilon(1e-15));
  for (double t : {0.0, 0.3, 0.999999999}) {
    for (double tau : {0.0, 0.2, 0.7071067811865476, 1.0}) {
      const double r = time_step(t, tau);
      CHECK(r >= 0.0);
      CHECK(r < 1.0);
    }
  }
}

TEST_CASE("floor_mod stays in [0, period) near multiples") {
  CHECK(floor_mod(-1e-300, 1.0) < 1.0);
  CHECK(floor_mod(-0.25, 1.0) == 0.75);
  CHECK(floor_mod(kTwoPi, kTwoPi) == 0.0);
  const double below = std::nextafter(kTwoPi, 0.0);
  CHECK(floor_mod(below, kTwoPi) < kTwoPi);
  CHECK(floor_mod(-std::nextafter(0.0, 1.0), kTwoPi) < kTwoPi);
}

TEST_CASE("kick_step") {
  MapParams p;
  p.C = 1.0 / 3.0;
  p.K = 10.0;
  p.nu = 1.0 / 2.1;
  p.omega = 1.0;
  SUBCASE("cos(pi/2) removes the kick") {
    CHECK(kick_step(1.0, 0.25, 1.234, p) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("sin(0) removes the kick") { CHECK(kick_step(2.0, 0.0, 0.0, p) == 2.0 / 3.0); }
  SUBCASE("full kick against a 40-digit evaluation") {
    // (1/3)(1 + 10 exp(-1/2.1)) = 2.403817192051505157...
    CHECK(kick_step(1.0, 0.0, kTwoPi / 4.0, p) ==
          doctest::Approx(2.403817192051505157).epsilon(1e-14));
  }
}

TEST_CASE("position_step") {
  MapParams p;
  p.mu_v = 0.1;
  p.vel_divisor = 50.0;
  CHECK(position_step(0.1, 0.5, StepMode::Raw, p, 1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(position_step(0.0, 0.0, StepMode::Scaled, p, 1) == 0.1);
  CHECK(position_step(5.0, 1.0, StepMode::Scaled, p, -1) == doctest::Approx(4.88).epsilon(1e-15));
  CHECK(position_step(0.0, 2.0, StepMode::Raw, p, -1) == -2.0);
}

TEST_CASE("step: zero state is a global fixed point") {
  const TrajectoryState zero{};
  CHECK(step(zero, fig1_params(), StepMode::Raw) == zero);
}

TEST_CASE("step: one composite step against a 40-digit evaluation") {
  const TrajectoryState s{0.1, 0.0, 0.0, 0.1, 1};
  const auto n = step(s, fig1_params(), StepMode::Raw);
  CHECK(n.tau == doctest::Approx(0.36000000000000001776).epsilon(1e-15));
  CHECK(n.t == doctest::Approx(0.50911688245431424269).epsilon(1e-13));
  CHECK(n.v == doctest::Approx(-0.50232580709575420873).epsilon(1e-12));
  CHECK(n.x == doctest::Approx(-0.40232580709575420318).epsilon(1e-12));
}

TEST_CASE("step: invariants over a long trajectory") {
  TrajectoryState s{0.1, 0.0, 0.0, 0.1, 1};
  const auto p = fig1_params();
  bool ok = true;
  for (int i = 0; i < 100000 && ok; ++i) {
    s = step(s, p, StepMode::Raw);
    ok = s.tau >= 0.0 && s.tau <= 1.0 && s.t >= 0.0 && s.t < 1.0 && std::isfinite(s.v) &&
         std::isfinite(s.x);
  }
  CHECK(ok);
}

TEST_CASE("step: K = 0 gives exact geometric velocity decay") {
  MapParams p = fig1_params();
  p.K = 0.0;
  TrajectoryState s{0.3, 0.2, 1.0, 0.5, 1};
  double expected = 1.0;
  for (int i = 0; i < 100; ++i) {
    s = step(s, p, StepMode::Raw);
    expected *= p.C;
    REQUIRE(s.v == expected);
  }
}

TEST_CASE("step is a pure function") {
  const auto p = fig1_params();
  const TrajectoryState s{0.123, 0.456, -0.7, 2.5, -1};
  const auto a = step(s, p, StepMode::Scaled);
  const auto b = step(s, p, StepMode::Scaled);
  CHECK(std::bit_cast<std::uint64_t>(a.tau) == std::bit_cast<std::uint64_t>(b.tau));
  CHECK(std::bit_cast<std::uint64_t>(a.t) == std::bit_cast<std::uint64_t>(b.t));
  CHECK(std::bit_cast<std::uint64_t>(a.v) == std::bit_cast<std::uint64_t>(b.v));
  CHECK(std::bit_cast<std::uint64_t>(a.x) == std::bit_cast<std::uint64_t>(b.x));
  CHECK(a.dir == b.dir);
}

TEST_CASE("update ordering: v1 sees x0 only through sin(omega x0), tau0 only through t1") {
  const auto p = fig1_params();
  const TrajectoryState base{0.2, 0.3, 0.4, 0.7, 1};
  const auto b1 = step(base, p, StepMode::Raw);
  const double h = 1e-7;

  SUBCASE("x0 perturbation") {
    auto s = base;
    s.x += h;
    const auto n = step(s, p, StepMode::Raw);
    CHECK(n.tau == b1.tau);
    CHECK(n.t == b1.t);
    // dv1/dx0 = C K cos(2 pi t1) omega cos(omega x0) exp(-nu |v0|)
    const double expected = p.C * p.K * std::cos(kTwoPi * b1.t) * p.omega *
                            std::cos(p.omega * base.x) * std::exp(-p.nu * std::fabs(base.v));
    CHECK((n.v - b1.v) / h == doctest::Approx(expected).epsilon(1e-5));
  }
  SUBCASE("tau0 perturbation") {
    auto s = base;
    s.tau += h;
    const auto n = step(s, p, StepMode::Raw);
    const double dtau1 = 4.0 * (1.0 - 2.0 * base.tau);
    const double dt1 = kSqrt2 * dtau1;
    CHECK((n.t - b1.t) / h == doctest::Approx(dt1).epsilon(1e-5));
    // dv1/dtau0 = dv1/dt1 * dt1/dtau0
    const double dv_dt = -p.C * p.K * kTwoPi * std::sin(kTwoPi * b1.t) *
                         std::sin(p.omega * base.x) * std::exp(-p.nu * std::fabs(base.v));
    CHECK((n.v - b1.v) / h == doctest::Approx(dv_dt * dt1).epsilon(1e-4));
  }
}

TEST_CASE("tau and t stay in range for many starting points over 10^6 iterations") {
  const auto p = fig1_params();
  const CounterRng rng(7);
  for (std::uint64_t k = 0; k < 4; ++k) {
    TrajectoryState s{rng.uniform_open(k, 0), rng.uniform_open(k, 1), 0.0, 0.1, 1};
    bool ok = true;
    for (int i = 0; i < 1000000; ++i) {
      s = step(s, p, StepMode::Raw);
      if (!(s.tau >= 0.0 && s.tau <= 1.0 && s.t >= 0.0 && s.t < 1.0)) {
        ok = false;
        break;
      }
    }
    CHECK(ok);
  }
}

TEST_CASE("MapParams validation") {
  MapParams p;
  CHECK_NOTHROW(validate(p));
  p.C = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = MapParams{};
  p.nu = -1.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = MapParams{};
  p.vel_divisor = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = MapParams{};
  p.K = -0.5;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("CounterRng draws are pure and in the open interval") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.bits(5, 1) == b.bits(5, 1));
  CHECK(a.bits(5, 1) != c.bits(5, 1));
  CHECK(a.bits(5, 1) != a.bits(1, 5));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform_open(i, 0);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}
