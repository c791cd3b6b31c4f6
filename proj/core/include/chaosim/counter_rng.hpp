#pragma once

#include <cmath>
#include <cstdint>

namespace chaosim {

// Stateless generator: every draw is a pure function of
// (seed, stream, index), so particle i's initial condition never depends on
// how particles are scheduled. Mixing is SplitMix64's finalizer applied to
// a Weyl-sequence style combination of the three keys.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t stream,
                               std::uint64_t index) const {
    return mix(mix(mix(seed_) ^ stream) + index);
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open(std::uint64_t stream, std::uint64_t index) const {
    const std::uint64_t k = bits(stream, index) >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (lo, hi).
  double uniform(std::uint64_t stream, std::uint64_t index, double lo,
                 double hi) const {
    return lo + (hi - lo) * uniform_open(stream, index);
  }

  // Box-Muller on two consecutive draws; only the cosine branch is used so
  // each normal consumes exactly indices (index, index + 1).
  double normal(std::uint64_t stream, std::uint64_t index, double mean,
                double sigma) const {
    const double u1 = uniform_open(stream, index);
    const double u2 = uniform_open(stream, index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(6.283185307179586 * u2);
  }

  constexpr std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace chaosim
