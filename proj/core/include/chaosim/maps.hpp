#pragma once

#include <cmath>

namespace chaosim {

// sqrt(2) rounded to the nearest double.
inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kTwoPi = 6.283185307179586;

enum class StepMode { Raw, Scaled };

// Constants of the kicked velocity update plus the drift scaling used by
// Scaled mode.
struct MapParams {
  double C = 1.0 / 3.0;
  double K = 10.0;
  double omega = 1.0;
  double nu = 1.0 / 2.1;
  double vel_divisor = 50.0;
  double mu_v = 0.1;

  bool operator==(const MapParams&) const = default;
};

// Throws std::invalid_argument naming the first offending field.
void validate(const MapParams& p);

struct TrajectoryState {
  double tau = 0.0;  // logistic driver, [0, 1]
  double t = 0.0;    // time phase, [0, 1)
  double v = 0.0;
  double x = 0.0;
  int dir = 1;  // +1 or -1; flipped by reflecting boundaries

  bool operator==(const TrajectoryState&) const = default;
};

// Floor-based reduction into [0, period).
double floor_mod(double value, double period);

// tau -> 4 tau (1 - tau). Throws std::domain_error outside [0, 1].
double logistic_step(double tau);

// (t + tau_next * sqrt 2) mod 1, always in [0, 1).
double time_step(double t, double tau_next);

double kick_step(double v, double t_next, double x, const MapParams& p);

double position_step(double x, double v_next, StepMode mode,
                     const MapParams& p, int dir);

/// One full iteration: tau, then t from the new tau, then v from the new t
/// with the old x and v, then x from the new v.
TrajectoryState step(const TrajectoryState& s, const MapParams& p,
                     StepMode mode);

/// Displacement per iteration implied by an internal velocity: dir*v in Raw
/// mode, dir*(v/vel_divisor + mu_v) in Scaled mode.
double effective_velocity(double v, int dir, StepMode mode,
                          const MapParams& p);

inline bool is_finite(const TrajectoryState& s) {
  return std::isfinite(s.tau) && std::isfinite(s.t) && std::isfinite(s.v) &&
         std::isfinite(s.x);
}

}  // namespace chaosim
