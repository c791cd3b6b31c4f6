#pragma once

#include <limits>
#include <string_view>
#include <utility>
#include <variant>

#include "chaosim/maps.hpp"

namespace chaosim {

struct Annulus {
  double circumference = kTwoPi;
  bool operator==(const Annulus&) const = default;
};

struct FreeSpace {
  bool operator==(const FreeSpace&) const = default;
};

struct DoubleSlit {
  double x_screen = 1000.0;
  double x_barrier = 500.0;
  std::pair<double, double> slit_centers{-25.0, 25.0};
  double slit_width = 10.0;
  double vx = 1.0;
  double reinit_tau = 0.1;
  double reinit_t = 0.0;
  // Ablation switches: without the barrier every particle passes x_barrier;
  // without reinitialization the y driver keeps running untouched.
  bool barrier_enabled = true;
  bool reinit_enabled = true;

  bool in_slit(double y) const;
  bool operator==(const DoubleSlit&) const = default;
};

enum class BarrierInterior {
  Free,      // transmitted particles move through unmodified
  Slowdown,  // displacement inside the barrier shrinks to sqrt(v^2 - 2 height)
};

struct Barrier {
  double x_barrier = 3.0;  // leading face
  double width = 0.5;
  double height = 0.5 * (0.1 * 0.1 + 0.032 * 0.032);
  BarrierInterior interior = BarrierInterior::Free;

  double far_face() const { return x_barrier + width; }
  bool operator==(const Barrier&) const = default;
};

struct Box {
  double x_min = -5.0;
  double x_max = 5.0;
  bool operator==(const Box&) const = default;
};

using ScenarioSpec = std::variant<Annulus, FreeSpace, DoubleSlit, Barrier, Box>;

std::string_view scenario_name(const ScenarioSpec& s);

// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioSpec& s);

// Annulus and slit motion follow the raw position update; the remaining
// scenarios use the scaled drift update. FreeSpace accepts either.
StepMode default_mode(const ScenarioSpec& s);
bool mode_allowed(const ScenarioSpec& s, StepMode mode);

TrajectoryState advance_annulus(const TrajectoryState& s, const MapParams& p,
                                double circumference);
TrajectoryState advance_free(const TrajectoryState& s, const MapParams& p,
                             StepMode mode = StepMode::Scaled);
TrajectoryState advance_barrier(const TrajectoryState& s, const MapParams& p,
                                const Barrier& spec);
TrajectoryState advance_box(const TrajectoryState& s, const MapParams& p,
                            const Box& spec);

// Dispatch for the one-dimensional scenarios. DoubleSlit is rejected with
// std::invalid_argument; it has its own particle type.
TrajectoryState advance(const TrajectoryState& s, const MapParams& p,
                        StepMode mode, const ScenarioSpec& scenario);

struct SlitParticle3D {
  TrajectoryState y_state;
  TrajectoryState z_state;
  double x = 0.0;
  double vx = 1.0;
  bool reflected = false;
  bool through_slit = false;
  bool hit_screen = false;

  bool finished() const { return reflected || hit_screen; }
  bool operator==(const SlitParticle3D&) const = default;
};

// Precondition: the particle is not finished. On crossing x_barrier the
// transverse position is tested at its pre-step value.
SlitParticle3D advance_slit(const SlitParticle3D& sp, const MapParams& p,
                            const DoubleSlit& spec);

}  // namespace chaosim
