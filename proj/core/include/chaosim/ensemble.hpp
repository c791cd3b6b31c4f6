#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "chaosim/histogram.hpp"
#include "chaosim/maps.hpp"
#include "chaosim/scenarios.hpp"
#include "chaosim/stats.hpp"

namespace chaosim {

// Every particle starts from the same state.
struct FixedPoint {
  double tau0 = 0.1;
  double t0 = 0.0;
  double v0 = 0.0;
  double x0 = 0.1;
  bool operator==(const FixedPoint&) const = default;
};

// tau0 and t0 drawn per particle; position and velocity shared.
struct RandomTimePhase {
  double x0 = 0.0;
  double v0 = 0.0;
  bool operator==(const RandomTimePhase&) const = default;
};

// tau0 and t0 drawn per particle, x0 ~ Normal(mu_x, sigma_x).
struct GaussianPosition {
  double mu_x = 0.0;
  double sigma_x = 0.118;
  double v0 = 0.0;
  bool operator==(const GaussianPosition&) const = default;
};

using InitPolicy = std::variant<FixedPoint, RandomTimePhase, GaussianPosition>;

// Drawn phases live on (kPhaseEpsilon, 1 - kPhaseEpsilon), away from the
// logistic map's fixed and eventually-fixed points.
inline constexpr double kPhaseEpsilon = 1e-6;

// Per-frame histogram edges. With no fixed range the frame spans
// mean +/- span_sigma * std of its own sample.
struct Binning {
  std::size_t bins = 201;
  double span_sigma = 5.0;
  std::optional<std::pair<double, double>> range;
  bool operator==(const Binning&) const = default;
};

// Optional time-pooled statistics over every particle and iteration, for
// single-trajectory runs where frames alone carry one sample each.
struct Accumulation {
  std::pair<double, double> v_range{-10.0, 10.0};
  std::size_t v_bins = 201;
  std::pair<double, double> x_range{0.0, kTwoPi};
  std::size_t x_bins = 50;
  std::size_t forcing_bins = 201;
  bool operator==(const Accumulation&) const = default;
};

struct EnsembleSpec {
  std::size_t n_particles = 1;
  std::size_t n_iterations = 1000;
  std::uint64_t seed = 12345;
  InitPolicy init = FixedPoint{};
  MapParams params;
  std::optional<StepMode> mode;  // defaults per scenario
  std::size_t snapshot_every = 1;
  Binning x_binning;
  Binning v_binning;
  std::optional<Accumulation> accumulate;

  bool operator==(const EnsembleSpec&) const = default;
};

// Throws std::invalid_argument naming the offending field.
void validate(const EnsembleSpec& spec);

StepMode resolved_mode(const EnsembleSpec& spec, const ScenarioSpec& scenario);

std::vector<TrajectoryState> init_particles(const EnsembleSpec& spec);

// Slit particles draw their y and z drivers from disjoint counter ranges.
std::vector<SlitParticle3D> init_slit_particles(const EnsembleSpec& spec,
                                                const DoubleSlit& slit);

struct SubEnsemble {
  std::size_t count = 0;
  std::optional<Moments> x;
  bool operator==(const SubEnsemble&) const = default;
};

struct SlitCounts {
  std::size_t in_flight = 0;
  std::size_t reflected = 0;
  std::size_t through_slit = 0;
  std::size_t hit_screen = 0;
  bool operator==(const SlitCounts&) const = default;
};

struct Frame {
  std::size_t iteration = 0;
  std::size_t n_alive = 0;
  std::size_t n_diverged = 0;
  Histogram x_hist;
  Histogram v_hist;
  std::optional<Moments> x;
  std::optional<Moments> v;
  // Barrier runs: particles beyond the far face.
  std::optional<SubEnsemble> transmitted;
  // Slit runs: histograms and moments are over in-flight particles' y.
  std::optional<SlitCounts> slit;

  bool operator==(const Frame&) const = default;
};

struct TimeSummary {
  std::size_t samples = 0;
  Moments v;
  Moments x;
  Moments forcing;
  Histogram v_hist;
  Histogram x_hist;
  Histogram forcing_hist;
  bool operator==(const TimeSummary&) const = default;
};

struct ScreenHit {
  std::size_t particle = 0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const ScreenHit&) const = default;
};

struct SlitSummary {
  SlitCounts counts;
  std::vector<ScreenHit> hits;  // particle-index order
  bool operator==(const SlitSummary&) const = default;
};

struct EnsembleResult {
  std::vector<Frame> frames;
  std::size_t n_diverged = 0;
  std::optional<TimeSummary> accumulated;
  std::optional<SlitSummary> slit;
  bool operator==(const EnsembleResult&) const = default;
};

struct RunOptions {
  unsigned threads = 1;
};

// Evolves every particle under the scenario and snapshots every
// snapshot_every iterations (iteration 0 included, and the final iteration
// always). Output is independent of options.threads.
EnsembleResult run_ensemble(const EnsembleSpec& spec,
                            const ScenarioSpec& scenario,
                            const RunOptions& options = {});

// Histogram edges for a frame sample under a binning policy.
Histogram frame_histogram(std::span<const double> samples,
                          const std::optional<Moments>& m,
                          const Binning& binning);

// Screen-y histogram used for fringe detection: bins 1/6 of the kick
// wavelength 2 pi / omega wide, spanning mean +/- 3 std of the hits.
Histogram screen_histogram(const std::vector<ScreenHit>& hits, double omega);

}  // namespace chaosim
