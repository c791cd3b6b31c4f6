#include "chaosim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "chaosim/counter_rng.hpp"

namespace chaosim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_binning(const Binning& b, const std::string& name) {
  require(b.bins >= 1, name + ".bins must be >= 1");
  require(std::isfinite(b.span_sigma) && b.span_sigma > 0.0,
          name + ".span_sigma must be > 0");
  if (b.range) {
    require(std::isfinite(b.range->first) && std::isfinite(b.range->second) &&
                b.range->first < b.range->second,
            name + ".range must satisfy lo < hi");
  }
}

bool usable_range(double lo, double hi) {
  return std::isfinite(lo) && std::isfinite(hi) && lo < hi && std::isfinite(hi - lo);
}

constexpr double kMaxScreenBins = 1e5;

bool valid_range(const std::pair<double, double>& r) {
  return std::isfinite(r.first) && std::isfinite(r.second) && r.first < r.second;
}

// Draw slots within a particle's counter stream.
constexpr std::uint64_t kDrawTau = 0;
constexpr std::uint64_t kDrawT = 1;
constexpr std::uint64_t kDrawX = 2;  // consumes 2 and 3
constexpr std::uint64_t kSlitZOffset = 4;

TrajectoryState draw_state(const InitPolicy& policy, const CounterRng& rng,
                           std::uint64_t particle, std::uint64_t offset) {
  const double lo = kPhaseEpsilon;
  const double hi = 1.0 - kPhaseEpsilon;
  TrajectoryState s;
  if (const auto* f = std::get_if<FixedPoint>(&policy)) {
    s.tau = f->tau0;
    s.t = f->t0;
    s.v = f->v0;
    s.x = f->x0;
    return s;
  }
  s.tau = rng.uniform(particle, offset + kDrawTau, lo, hi);
  s.t = rng.uniform(particle, offset + kDrawT, lo, hi);
  if (const auto* r = std::get_if<RandomTimePhase>(&policy)) {
    s.v = r->v0;
    s.x = r->x0;
  } else {
    const auto& g = std::get<GaussianPosition>(policy);
    s.v = g.v0;
    s.x = rng.normal(particle, offset + kDrawX, g.mu_x, g.sigma_x);
  }
  return s;
}

std::vector<std::size_t> frame_schedule(const EnsembleSpec& spec) {
  std::vector<std::size_t> its;
  for (std::size_t it = 0; it <= spec.n_iterations; it += spec.snapshot_every) {
    its.push_back(it);
  }
  if (its.back() != spec.n_iterations) its.push_back(spec.n_iterations);
  return its;
}

// Runs fn(lo, hi) over contiguous shards of [0, n). Each shard is owned by
// exactly one worker, so the result cannot depend on the shard count.
template <class Fn>
void parallel_shards(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(threads == 0 ? 1 : threads, n));
  if (workers == 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&fn, lo, hi, w] { fn(lo, hi, w); });
  }
}

std::size_t worker_count(std::size_t n, unsigned threads) {
  return std::max<std::size_t>(1, std::min<std::size_t>(threads == 0 ? 1 : threads, n));
}

std::optional<Moments> maybe_moments(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return moments(xs);
}

struct ParticleAccumulators {
  MomentAccumulator v, x, forcing;
};

struct ShardHistograms {
  Histogram v, x, forcing;
};

EnsembleResult run_slit(const EnsembleSpec& spec, const DoubleSlit& slit,
                        const RunOptions& options) {
  auto particles = init_slit_particles(spec, slit);
  const std::size_t n = particles.size();
  std::vector<std::uint8_t> alive(n, 1);
  const auto schedule = frame_schedule(spec);

  EnsembleResult result;
  std::size_t done = 0;
  for (std::size_t f = 0; f < schedule.size(); ++f) {
    const std::size_t target = schedule[f];
    const std::size_t steps = target - done;
    if (steps > 0) {
      parallel_shards(n, options.threads, [&](std::size_t lo, std::size_t hi, std::size_t) {
        for (std::size_t i = lo; i < hi; ++i) {
          if (!alive[i]) continue;
          SlitParticle3D p = particles[i];
          for (std::size_t k = 0; k < steps && !p.finished(); ++k) {
            p = advance_slit(p, spec.params, slit);
            if (!is_finite(p.y_state) || !is_finite(p.z_state)) {
              alive[i] = 0;
              break;
            }
          }
          particles[i] = p;
        }
      });
      done = target;
    }

    Frame frame;
    frame.iteration = target;
    SlitCounts counts;
    std::vector<double> ys, vs;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) {
        ++frame.n_diverged;
        continue;
      }
      ++frame.n_alive;
      const auto& p = particles[i];
      if (p.reflected) ++counts.reflected;
      if (p.through_slit) ++counts.through_slit;
      if (p.hit_screen) ++counts.hit_screen;
      if (!p.finished()) {
        ++counts.in_flight;
        ys.push_back(p.y_state.x);
        vs.push_back(p.y_state.v);
      }
    }
    frame.x = maybe_moments(ys);
    frame.v = maybe_moments(vs);
    frame.x_hist = frame_histogram(ys, frame.x, spec.x_binning);
    frame.v_hist = frame_histogram(vs, frame.v, spec.v_binning);
    frame.slit = counts;
    result.frames.push_back(std::move(frame));
  }

  SlitSummary summary;
  summary.counts = result.frames.back().slit.value();
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i] && particles[i].hit_screen) {
      summary.hits.push_back({i, particles[i].y_state.x, particles[i].z_state.x});
    }
  }
  result.n_diverged = result.frames.back().n_diverged;
  result.slit = std::move(summary);
  return result;
}

}  // namespace

void validate(const EnsembleSpec& spec) {
  require(spec.n_particles >= 1, "n_particles must be >= 1");
  require(spec.snapshot_every >= 1, "snapshot_every must be >= 1");
  validate(spec.params);
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FixedPoint>) {
          require(p.tau0 >= 0.0 && p.tau0 <= 1.0, "init.tau0 must lie in [0, 1]");
          require(p.t0 >= 0.0 && p.t0 < 1.0, "init.t0 must lie in [0, 1)");
          require(std::isfinite(p.v0) && std::isfinite(p.x0),
                  "init.v0 and init.x0 must be finite");
        } else if constexpr (std::is_same_v<T, RandomTimePhase>) {
          require(std::isfinite(p.v0) && std::isfinite(p.x0),
                  "init.v0 and init.x0 must be finite");
        } else {
          require(std::isfinite(p.mu_x), "init.mu_x must be finite");
          require(p.sigma_x >= 0.0 && std::isfinite(p.sigma_x),
                  "init.sigma_x must be >= 0");
          require(std::isfinite(p.v0), "init.v0 must be finite");
        }
      },
      spec.init);
  validate_binning(spec.x_binning, "frames.x");
  validate_binning(spec.v_binning, "frames.v");
  if (spec.accumulate) {
    const auto& a = *spec.accumulate;
    require(valid_range(a.v_range), "accumulate.v_range must satisfy lo < hi");
    require(valid_range(a.x_range), "accumulate.x_range must satisfy lo < hi");
    require(a.v_bins >= 1 && a.x_bins >= 1 && a.forcing_bins >= 1,
            "accumulate bin counts must be >= 1");
  }
}

StepMode resolved_mode(const EnsembleSpec& spec, const ScenarioSpec& scenario) {
  return spec.mode.value_or(default_mode(scenario));
}

std::vector<TrajectoryState> init_particles(const EnsembleSpec& spec) {
  validate(spec);
  const CounterRng rng(spec.seed);
  std::vector<TrajectoryState> out(spec.n_particles);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = draw_state(spec.init, rng, i, 0);
  }
  return out;
}

std::vector<SlitParticle3D> init_slit_particles(const EnsembleSpec& spec,
                                                const DoubleSlit& slit) {
  validate(spec);
  const CounterRng rng(spec.seed);
  std::vector<SlitParticle3D> out(spec.n_particles);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].y_state = draw_state(spec.init, rng, i, 0);
    out[i].z_state = draw_state(spec.init, rng, i, kSlitZOffset);
    out[i].x = 0.0;
    out[i].vx = slit.vx;
  }
  return out;
}

Histogram frame_histogram(std::span<const double> samples,
                          const std::optional<Moments>& m,
                          const Binning& binning) {
  if (binning.range) {
    Histogram h(binning.range->first, binning.range->second, binning.bins);
    for (double x : samples) h.add(x);
    return h;
  }
  // Candidate ranges in order of preference. Huge but finite samples can
  // overflow the sigma span, so fall back to the sample extent.
  std::vector<std::pair<double, double>> candidates;
  if (m) {
    const double half = m->std > 0.0 ? binning.span_sigma * m->std : 0.5;
    candidates.emplace_back(m->mean - half, m->mean + half);
  }
  if (!samples.empty()) {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    candidates.emplace_back(*lo, *hi);
  }
  if (m) candidates.emplace_back(m->mean - 0.5, m->mean + 0.5);
  std::pair<double, double> range{-0.5, 0.5};
  for (const auto& c : candidates) {
    if (usable_range(c.first, c.second)) {
      range = c;
      break;
    }
  }
  Histogram h(range.first, range.second, binning.bins);
  for (double x : samples) h.add(x);
  return h;
}

Histogram screen_histogram(const std::vector<ScreenHit>& hits, double omega) {
  const double width = kTwoPi / std::fabs(omega) / 6.0;
  if (hits.empty()) return Histogram(-0.5 * width, 0.5 * width, 1);
  std::vector<double> ys;
  ys.reserve(hits.size());
  for (const auto& h : hits) ys.push_back(h.y);
  const Moments m = moments(ys);
  const double half = std::max(3.0 * m.std, 0.5 * width);
  const double bins = std::round(2.0 * half / width);
  if (!usable_range(m.mean - half, m.mean + half) || !(bins <= kMaxScreenBins)) {
    return frame_histogram(ys, m, Binning{});
  }
  Histogram h(m.mean - half, m.mean + half, static_cast<std::size_t>(std::max(1.0, bins)));
  for (double y : ys) h.add(y);
  return h;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec,
                            const ScenarioSpec& scenario,
                            const RunOptions& options) {
  validate(spec);
  validate(scenario);
  const StepMode mode = resolved_mode(spec, scenario);
  if (!mode_allowed(scenario, mode)) {
    throw std::invalid_argument("mode is not allowed for scenario " +
                                std::string(scenario_name(scenario)));
  }
  if (const auto* slit = std::get_if<DoubleSlit>(&scenario)) {
    return run_slit(spec, *slit, options);
  }

  auto particles = init_particles(spec);
  const std::size_t n = particles.size();
  std::vector<std::uint8_t> alive(n, 1);
  const auto schedule = frame_schedule(spec);
  const MapParams& params = spec.params;
  const auto* barrier = std::get_if<Barrier>(&scenario);

  const bool accumulate = spec.accumulate.has_value();
  std::vector<ParticleAccumulators> acc;
  std::vector<ShardHistograms> shard_hists;
  if (accumulate) {
    const auto& a = *spec.accumulate;
    acc.resize(n);
    shard_hists.assign(worker_count(n, options.threads),
                       ShardHistograms{Histogram(a.v_range.first, a.v_range.second, a.v_bins),
                                       Histogram(a.x_range.first, a.x_range.second, a.x_bins),
                                       Histogram(-1.0, 1.0, a.forcing_bins)});
  }

  EnsembleResult result;
  std::size_t done = 0;
  for (std::size_t target : schedule) {
    const std::size_t steps = target - done;
    if (steps > 0) {
      parallel_shards(n, options.threads, [&](std::size_t lo, std::size_t hi, std::size_t w) {
        for (std::size_t i = lo; i < hi; ++i) {
          if (!alive[i]) continue;
          TrajectoryState s = particles[i];
          for (std::size_t k = 0; k < steps; ++k) {
            const TrajectoryState next = advance(s, params, mode, scenario);
            if (!is_finite(next)) {
              alive[i] = 0;
              break;
            }
            if (accumulate) {
              const double v_eff = effective_velocity(next.v, next.dir, mode, params);
              const double forcing =
                  std::cos(kTwoPi * next.t) * std::sin(params.omega * s.x);
              acc[i].v.push(v_eff);
              acc[i].x.push(next.x);
              acc[i].forcing.push(forcing);
              shard_hists[w].v.add(v_eff);
              shard_hists[w].x.add(next.x);
              shard_hists[w].forcing.add(forcing);
            }
            s = next;
          }
          particles[i] = s;
        }
      });
      done = target;
    }

    Frame frame;
    frame.iteration = target;
    std::vector<double> xs, vs, beyond;
    xs.reserve(n);
    vs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) {
        ++frame.n_diverged;
        continue;
      }
      const auto& s = particles[i];
      xs.push_back(s.x);
      vs.push_back(effective_velocity(s.v, s.dir, mode, params));
      if (barrier && s.x > barrier->far_face()) beyond.push_back(s.x);
    }
    frame.n_alive = xs.size();
    frame.x = maybe_moments(xs);
    frame.v = maybe_moments(vs);
    frame.x_hist = frame_histogram(xs, frame.x, spec.x_binning);
    frame.v_hist = frame_histogram(vs, frame.v, spec.v_binning);
    if (barrier) frame.transmitted = SubEnsemble{beyond.size(), maybe_moments(beyond)};
    result.frames.push_back(std::move(frame));
  }
  result.n_diverged = result.frames.back().n_diverged;

  if (accumulate) {
    MomentAccumulator v, x, forcing;
    for (const auto& a : acc) {
      v.merge(a.v);
      x.merge(a.x);
      forcing.merge(a.forcing);
    }
    if (v.count() > 0) {
      TimeSummary ts;
      ts.samples = v.count();
      ts.v = v.result();
      ts.x = x.result();
      ts.forcing = forcing.result();
      ts.v_hist = shard_hists[0].v;
      ts.x_hist = shard_hists[0].x;
      ts.forcing_hist = shard_hists[0].forcing;
      for (std::size_t w = 1; w < shard_hists.size(); ++w) {
        ts.v_hist = merge_histograms(ts.v_hist, shard_hists[w].v);
        ts.x_hist = merge_histograms(ts.x_hist, shard_hists[w].x);
        ts.forcing_hist = merge_histograms(ts.forcing_hist, shard_hists[w].forcing);
      }
      result.accumulated = std::move(ts);
    }
  }
  return result;
}

}  // namespace chaosim
