#include "chaosim/maps.hpp"

#include <stdexcept>
#include <string>

namespace chaosim {

void validate(const MapParams& p) {
  if (!(p.C > 0.0 && p.C <= 1.0)) {
    throw std::invalid_argument("C must lie in (0, 1], got " +
                                std::to_string(p.C));
  }
  if (!(p.K >= 0.0) || !std::isfinite(p.K)) {
    throw std::invalid_argument("K must be finite and >= 0");
  }
  if (!std::isfinite(p.omega)) {
    throw std::invalid_argument("omega must be finite");
  }
  if (!(p.nu >= 0.0) || !std::isfinite(p.nu)) {
    throw std::invalid_argument("nu must be finite and >= 0");
  }
  if (!(p.vel_divisor > 0.0) || !std::isfinite(p.vel_divisor)) {
    throw std::invalid_argument("vel_divisor must be finite and > 0");
  }
  if (!std::isfinite(p.mu_v)) {
    throw std::invalid_argument("mu_v must be finite");
  }
}

double floor_mod(double value, double period) {
  double r = value - std::floor(value / period) * period;
  // The quotient can round across an integer; fold back into [0, period).
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double logistic_step(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("logistic_step: tau outside [0, 1]");
  }
  return 4.0 * tau * (1.0 - tau);
}

double time_step(double t, double tau_next) {
  return floor_mod(t + tau_next * kSqrt2, 1.0);
}

double kick_step(double v, double t_next, double x, const MapParams& p) {
  const double kick = p.K * std::cos(kTwoPi * t_next) * std::sin(p.omega * x) *
                      std::exp(-p.nu * std::fabs(v));
  return p.C * (v + kick);
}

double effective_velocity(double v, int dir, StepMode mode,
                          const MapParams& p) {
  if (mode == StepMode::Raw) return dir * v;
  return dir * (v / p.vel_divisor + p.mu_v);
}

double position_step(double x, double v_next, StepMode mode,
                     const MapParams& p, int dir) {
  return x + effective_velocity(v_next, dir, mode, p);
}

TrajectoryState step(const TrajectoryState& s, const MapParams& p,
                     StepMode mode) {
  TrajectoryState n;
  n.tau = logistic_step(s.tau);
  n.t = time_step(s.t, n.tau);
  n.v = kick_step(s.v, n.t, s.x, p);
  n.x = position_step(s.x, n.v, mode, p, s.dir);
  n.dir = s.dir;
  return n;
}

}  // namespace chaosim
