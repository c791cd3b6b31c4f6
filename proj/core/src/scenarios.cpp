#include "chaosim/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace chaosim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

bool DoubleSlit::in_slit(double y) const {
  const double half = 0.5 * slit_width;
  return std::fabs(y - slit_centers.first) <= half ||
         std::fabs(y - slit_centers.second) <= half;
}

std::string_view scenario_name(const ScenarioSpec& s) {
  return std::visit(overloaded{
                        [](const Annulus&) { return std::string_view{"annulus"}; },
                        [](const FreeSpace&) { return std::string_view{"free_space"}; },
                        [](const DoubleSlit&) { return std::string_view{"double_slit"}; },
                        [](const Barrier&) { return std::string_view{"barrier"}; },
                        [](const Box&) { return std::string_view{"box"}; },
                    },
                    s);
}

void validate(const ScenarioSpec& s) {
  std::visit(overloaded{
                 [](const Annulus& a) {
                   require(std::isfinite(a.circumference) && a.circumference > 0.0,
                           "circumference must be finite and > 0");
                 },
                 [](const FreeSpace&) {},
                 [](const DoubleSlit& d) {
                   require(std::isfinite(d.x_barrier) && std::isfinite(d.x_screen) &&
                               d.x_barrier < d.x_screen,
                           "x_barrier must be < x_screen");
                   require(d.slit_width > 0.0, "slit_width must be > 0");
                   require(d.vx > 0.0 && std::isfinite(d.vx), "vx must be finite and > 0");
                   require(d.reinit_tau >= 0.0 && d.reinit_tau <= 1.0,
                           "reinit tau must lie in [0, 1]");
                   require(d.reinit_t >= 0.0 && d.reinit_t < 1.0,
                           "reinit t must lie in [0, 1)");
                 },
                 [](const Barrier& b) {
                   require(std::isfinite(b.x_barrier), "x_barrier must be finite");
                   require(b.width > 0.0 && std::isfinite(b.width), "width must be > 0");
                   require(b.height >= 0.0, "height must be >= 0");
                 },
                 [](const Box& b) {
                   require(std::isfinite(b.x_min) && std::isfinite(b.x_max) &&
                               b.x_min < b.x_max,
                           "x_min must be < x_max");
                 },
             },
             s);
}

StepMode default_mode(const ScenarioSpec& s) {
  if (std::holds_alternative<Annulus>(s) || std::holds_alternative<DoubleSlit>(s)) {
    return StepMode::Raw;
  }
  return StepMode::Scaled;
}

bool mode_allowed(const ScenarioSpec& s, StepMode mode) {
  return std::holds_alternative<FreeSpace>(s) || mode == default_mode(s);
}

TrajectoryState advance_annulus(const TrajectoryState& s, const MapParams& p,
                                double circumference) {
  TrajectoryState n = step(s, p, StepMode::Raw);
  n.x = floor_mod(n.x, circumference);
  return n;
}

TrajectoryState advance_free(const TrajectoryState& s, const MapParams& p,
                             StepMode mode) {
  return step(s, p, mode);
}

TrajectoryState advance_barrier(const TrajectoryState& s, const MapParams& p,
                                const Barrier& spec) {
  TrajectoryState n = step(s, p, StepMode::Scaled);
  const double a = spec.x_barrier;
  const double b = spec.far_face();
  const double v_eff = effective_velocity(n.v, s.dir, StepMode::Scaled, p);

  const bool enters_left = s.x < a && n.x >= a;
  const bool enters_right = s.x > b && n.x <= b;
  if (enters_left || enters_right) {
    const double energy = 0.5 * v_eff * v_eff;
    if (!(energy > spec.height)) {
      const double face = enters_left ? a : b;
      n.x = 2.0 * face - n.x;
      n.dir = -s.dir;
      n.v = -n.v;
      return n;
    }
  }

  if (spec.interior == BarrierInterior::Slowdown) {
    // Only the part of the displacement that lies inside [a, b] is slowed.
    const double lo = std::max(std::min(s.x, n.x), a);
    const double hi = std::min(std::max(s.x, n.x), b);
    if (hi > lo) {
      const double inside = hi - lo;
      const double speed = std::fabs(v_eff);
      const double excess = v_eff * v_eff - 2.0 * spec.height;
      const double ratio = excess > 0.0 ? std::sqrt(excess) / speed : 0.0;
      const double sign = n.x >= s.x ? 1.0 : -1.0;
      n.x -= sign * inside * (1.0 - ratio);
    }
  }
  return n;
}

TrajectoryState advance_box(const TrajectoryState& s, const MapParams& p,
                            const Box& spec) {
  TrajectoryState n = step(s, p, StepMode::Scaled);
  // Fold until inside; each fold is one elastic bounce.
  while (n.x > spec.x_max || n.x < spec.x_min) {
    if (!std::isfinite(n.x)) break;
    const double bound = n.x > spec.x_max ? spec.x_max : spec.x_min;
    n.x = 2.0 * bound - n.x;
    n.dir = -n.dir;
    n.v = -n.v;
  }
  return n;
}

TrajectoryState advance(const TrajectoryState& s, const MapParams& p,
                        StepMode mode, const ScenarioSpec& scenario) {
  return std::visit(
      overloaded{
          [&](const Annulus& a) { return advance_annulus(s, p, a.circumference); },
          [&](const FreeSpace&) { return advance_free(s, p, mode); },
          [&](const Barrier& b) { return advance_barrier(s, p, b); },
          [&](const Box& b) { return advance_box(s, p, b); },
          [&](const DoubleSlit&) -> TrajectoryState {
            throw std::invalid_argument("advance: double slit needs advance_slit");
          },
      },
      scenario);
}

SlitParticle3D advance_slit(const SlitParticle3D& sp, const MapParams& p,
                            const DoubleSlit& spec) {
  SlitParticle3D n = sp;
  const double y_pre = sp.y_state.x;
  const double x_new = sp.x + sp.vx;
  n.y_state = step(sp.y_state, p, StepMode::Raw);
  n.z_state = step(sp.z_state, p, StepMode::Raw);

  if (sp.x < spec.x_barrier && x_new >= spec.x_barrier) {
    if (!spec.barrier_enabled || spec.in_slit(y_pre)) {
      n.through_slit = spec.barrier_enabled;
      if (spec.reinit_enabled) {
        n.y_state.tau = spec.reinit_tau;
        n.y_state.t = spec.reinit_t;
      }
    } else {
      n.reflected = true;
      n.vx = -sp.vx;
      n.x = 2.0 * spec.x_barrier - x_new;
      return n;
    }
  }

  n.x = x_new;
  if (n.x >= spec.x_screen) n.hit_screen = true;
  return n;
}

}  // namespace chaosim
