#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "chaosim/counter_rng.hpp"
#include "chaosim/scenarios.hpp"

using namespace chaosim;

namespace {

MapParams k10() {
  MapParams p;
  p.K = 10.0;
  return p;
}

TrajectoryState random_state(const CounterRng& rng, std::uint64_t i, double x) {
  return {rng.uniform_open(i, 0), rng.uniform_open(i, 1), 0.0, x, 1};
}

}  // namespace

TEST_CASE("scenario validation") {
  CHECK_NOTHROW(validate(ScenarioSpec{Annulus{}}));
  CHECK_THROWS_AS(validate(ScenarioSpec{Annulus{0.0}}), std::invalid_argument);
  DoubleSlit ds;
  ds.x_barrier = 2000.0;
  CHECK_THROWS_AS(validate(ScenarioSpec{ds}), std::invalid_argument);
  ds = DoubleSlit{};
  ds.slit_width = 0.0;
  CHECK_THROWS_AS(validate(ScenarioSpec{ds}), std::invalid_argument);
  Barrier b;
  b.width = 0.0;
  CHECK_THROWS_AS(validate(ScenarioSpec{b}), std::invalid_argument);
  b = Barrier{};
  b.height = -1.0;
  CHECK_THROWS_AS(validate(ScenarioSpec{b}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ScenarioSpec{Box{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("scenario names and modes") {
  CHECK(scenario_name(Annulus{}) == "annulus");
  CHECK(scenario_name(Box{}) == "box");
  CHECK(default_mode(Annulus{}) == StepMode::Raw);
  CHECK(default_mode(DoubleSlit{}) == StepMode::Raw);
  CHECK(default_mode(Barrier{}) == StepMode::Scaled);
  CHECK(mode_allowed(FreeSpace{}, StepMode::Raw));
  CHECK(mode_allowed(FreeSpace{}, StepMode::Scaled));
  CHECK_FALSE(mode_allowed(Box{}, StepMode::Raw));
}

TEST_CASE("annulus wraps with floor-mod") {
  MapParams p;
  p.K = 0.0;
  TrajectoryState s{0.3, 0.2, 0.9, kTwoPi - 0.1, 1};
  // K = 0: v' = C v = 0.3, x' = 2 pi - 0.1 + 0.3 -> 0.2
  const auto n = advance_annulus(s, p, kTwoPi);
  CHECK(n.x == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(n.v == doctest::Approx(0.3).epsilon(1e-15));

  s.v = 0.0;
  s.x = 1.0;
  for (int i = 0; i < 100; ++i) s = advance_annulus(s, p, kTwoPi);
  CHECK(s.x == 1.0);
}

TEST_CASE("annulus step is the raw free step followed by a wrap") {
  MapParams p;
  p.K = 95.0 / kTwoPi;
  p.omega = 1.0;
  TrajectoryState a{0.1, 0.0, 0.0, 0.1, 1};
  bool ok = true;
  for (int i = 0; i < 100000 && ok; ++i) {
    const auto na = advance_annulus(a, p, kTwoPi);
    const auto nf = advance_free(a, p, StepMode::Raw);
    ok = na.tau == nf.tau && na.t == nf.t && na.v == nf.v && na.x == floor_mod(nf.x, kTwoPi) &&
         na.x >= 0.0 && na.x < kTwoPi;
    a = na;
  }
  CHECK(ok);
}

TEST_CASE("annulus unwrapped position is continuous") {
  // Wrapping changes sin(omega x) only by rounding, so the unwrapped annulus
  // path tracks the free path until chaos amplifies that difference.
  MapParams p;
  p.K = 95.0 / kTwoPi;
  TrajectoryState a{0.1, 0.0, 0.0, 0.1, 1}, f = a;
  double unwrapped = a.x;
  for (int i = 0; i < 15; ++i) {
    a = advance_annulus(a, p, kTwoPi);
    f = advance_free(f, p, StepMode::Raw);
    unwrapped += a.v;
  }
  CHECK(unwrapped == doctest::Approx(f.x).epsilon(1e-9));
  CHECK(floor_mod(unwrapped, kTwoPi) == doctest::Approx(a.x).epsilon(1e-9));
}

TEST_CASE("free space drift with K = 0") {
  MapParams p;
  p.K = 0.0;
  TrajectoryState s{0.3, 0.5, 0.0, 1.0, 1};
  for (int i = 1; i <= 1000; ++i) {
    s = advance_free(s, p);
    REQUIRE(s.x == doctest::Approx(1.0 + 0.1 * i).epsilon(1e-12));
  }
}

TEST_CASE("barrier of height zero equals free space bitwise") {
  const CounterRng rng(17);
  const auto p = k10();
  Barrier b;
  b.height = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto s = random_state(rng, i, rng.normal(7, 2 * i, 0.0, 0.118));
    auto f = s;
    for (int k = 0; k < 150; ++k) {
      s = advance_barrier(s, p, b);
      f = advance_free(f, p);
    }
    REQUIRE(s == f);
  }
}

TEST_CASE("infinite barrier reflects everything") {
  const CounterRng rng(18);
  const auto p = k10();
  Barrier b;
  b.height = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto s = random_state(rng, i, rng.normal(7, 2 * i, 0.0, 0.118));
    double max_x = s.x;
    for (int k = 0; k < 150; ++k) {
      s = advance_barrier(s, p, b);
      max_x = std::max(max_x, s.x);
    }
    CHECK(max_x < b.x_barrier);
    CHECK(s.dir == -1);
  }
}

TEST_CASE("barrier reflection mirrors about the face and flips dir and v") {
  MapParams p;
  p.K = 0.0;
  Barrier b;  // face at 3
  b.height = 1.0;
  TrajectoryState s{0.3, 0.1, 0.0, 2.95, 1};
  const auto n = advance_barrier(s, p, b);
  CHECK(n.x == doctest::Approx(2.0 * 3.0 - 3.05).epsilon(1e-12));
  CHECK(n.dir == -1);
  CHECK(n.v == 0.0);
}

TEST_CASE("barrier energy threshold") {
  MapParams p;
  p.K = 0.0;
  Barrier b;
  b.height = 0.5 * 0.1 * 0.1;  // exactly the drift energy
  TrajectoryState s{0.3, 0.1, 0.0, 2.95, 1};
  CHECK(advance_barrier(s, p, b).dir == -1);  // E = height reflects
  s.v = 0.1;  // v' = 0.1 / 3 pushes v_eff above the drift
  CHECK(advance_barrier(s, p, b).dir == 1);
}

TEST_CASE("barrier slowdown interior shortens transit") {
  MapParams p;
  p.K = 0.0;
  Barrier slow;
  slow.height = 0.004;
  slow.interior = BarrierInterior::Slowdown;
  Barrier free = slow;
  free.interior = BarrierInterior::Free;
  TrajectoryState a{0.3, 0.1, 0.0, 2.0, 1}, f = a;
  for (int i = 0; i < 30; ++i) {
    a = advance_barrier(a, p, slow);
    f = advance_barrier(f, p, free);
  }
  CHECK(a.x < f.x);
  CHECK(a.x > 2.0);
}

TEST_CASE("box keeps particles inside for any parameters") {
  const CounterRng rng(23);
  const Box box;
  bool inside = true;
  std::size_t steps = 0;
  for (double K : {0.0, 10.0, 100.0, 1000.0, 1e5}) {
    MapParams p;
    p.K = K;
    for (std::uint64_t i = 0; i < 250 && inside; ++i) {
      auto s = random_state(rng, i, rng.normal(7, 2 * i, 0.0, 0.119));
      for (int k = 0; k < 1000; ++k) {
        s = advance_box(s, p, box);
        ++steps;
        if (!(s.x >= box.x_min && s.x <= box.x_max)) {
          inside = false;
          break;
        }
      }
    }
  }
  CHECK(inside);
  CHECK(steps >= 1000000);
}

TEST_CASE("box reflection preserves |v_eff| with K = 0") {
  MapParams p;
  p.K = 0.0;
  TrajectoryState s{0.3, 0.1, 0.0, 4.95, 1};
  const double before = std::fabs(effective_velocity(s.v, s.dir, StepMode::Scaled, p));
  const auto n = advance_box(s, p, Box{});
  CHECK(n.dir == -1);
  CHECK(n.x == doctest::Approx(4.95).epsilon(1e-12));
  CHECK(std::fabs(effective_velocity(n.v, n.dir, StepMode::Scaled, p)) == before);
}

TEST_CASE("box folds multiple reflections in one step") {
  MapParams p;
  p.K = 0.0;
  p.mu_v = 25.0;  // displacement longer than two box lengths
  TrajectoryState s{0.3, 0.1, 0.0, 0.0, 1};
  const auto n = advance_box(s, p, Box{});
  // 25 -> fold at 5 -> -15 -> fold at -5 -> 5
  CHECK(n.x == doctest::Approx(5.0));
  CHECK(n.dir == 1);
}

TEST_CASE("advance dispatches and rejects the slit") {
  const auto p = k10();
  const TrajectoryState s{0.2, 0.3, 0.0, 0.5, 1};
  CHECK(advance(s, p, StepMode::Scaled, Box{}) == advance_box(s, p, Box{}));
  CHECK(advance(s, p, StepMode::Raw, Annulus{}) == advance_annulus(s, p, kTwoPi));
  CHECK_THROWS_AS(advance(s, p, StepMode::Raw, DoubleSlit{}), std::invalid_argument);
}

TEST_CASE("slit membership") {
  const DoubleSlit ds;
  CHECK(ds.in_slit(25.0));
  CHECK(ds.in_slit(-20.0));
  CHECK(ds.in_slit(30.0));
  CHECK_FALSE(ds.in_slit(0.0));
  CHECK_FALSE(ds.in_slit(30.5));
}

namespace {

SlitParticle3D at_barrier(double y) {
  SlitParticle3D sp;
  sp.y_state = {0.37, 0.61, 0.2, y, 1};
  sp.z_state = {0.71, 0.13, -0.1, 0.0, 1};
  sp.x = 499.5;
  return sp;
}

}  // namespace

TEST_CASE("slit: particle at a slit centre passes and is reinitialized") {
  const DoubleSlit ds;
  const auto p = k10();
  const auto sp = at_barrier(25.0);
  const auto n = advance_slit(sp, p, ds);
  const auto free_y = step(sp.y_state, p, StepMode::Raw);
  CHECK(n.through_slit);
  CHECK_FALSE(n.reflected);
  CHECK(n.y_state.tau == 0.1);
  CHECK(n.y_state.t == 0.0);
  CHECK(n.y_state.x == free_y.x);
  CHECK(n.y_state.v == free_y.v);
  CHECK(n.z_state == step(sp.z_state, p, StepMode::Raw));
  CHECK(n.x == 500.5);
}

TEST_CASE("slit: particle between slits reflects") {
  const DoubleSlit ds;
  const auto n = advance_slit(at_barrier(0.0), k10(), ds);
  CHECK(n.reflected);
  CHECK(n.vx == -1.0);
  CHECK(n.finished());
  CHECK_FALSE(n.through_slit);
}

TEST_CASE("slit ablations") {
  DoubleSlit ds;
  ds.barrier_enabled = false;
  const auto open = advance_slit(at_barrier(0.0), k10(), ds);
  CHECK_FALSE(open.reflected);
  CHECK(open.y_state.tau == 0.1);
  ds.reinit_enabled = false;
  const auto plain = advance_slit(at_barrier(0.0), k10(), ds);
  CHECK(plain.y_state == step(at_barrier(0.0).y_state, k10(), StepMode::Raw));
}

TEST_CASE("slit: every particle ends with exactly one terminal flag") {
  const CounterRng rng(29);
  const DoubleSlit ds;
  const auto p = k10();
  std::size_t reflected = 0, hits = 0;
  const std::size_t n = 300;
  for (std::uint64_t i = 0; i < n; ++i) {
    SlitParticle3D sp;
    sp.y_state = random_state(rng, 2 * i, rng.normal(1000, 2 * i, 0.0, 0.118));
    sp.z_state = random_state(rng, 2 * i + 1, rng.normal(2000, 2 * i, 0.0, 0.118));
    int guard = 0;
    while (!sp.finished() && guard++ < 5000) sp = advance_slit(sp, p, ds);
    REQUIRE(sp.finished());
    CHECK(sp.reflected != sp.hit_screen);
    if (sp.hit_screen) CHECK(sp.through_slit);
    reflected += sp.reflected;
    hits += sp.hit_screen;
  }
  CHECK(reflected + hits == n);
}
