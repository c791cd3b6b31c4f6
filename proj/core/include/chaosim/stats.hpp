#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chaosim/histogram.hpp"

namespace chaosim {

// Sample moments. std uses the n-1 denominator; skewness and excess
// kurtosis are the standardized population moments and are absent when
// n < 3 or the sample is constant.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  std::optional<double> skewness;
  std::optional<double> excess_kurtosis;

  bool operator==(const Moments&) const = default;
};

// Two-pass moments with compensated summation in the given order.
// Throws std::invalid_argument when samples is empty.
Moments moments(std::span<const double> samples);

// Streaming central-moment accumulator (Welford, with the pairwise merge
// of Pebay). Deterministic as long as pushes and merges happen in a fixed
// order.
class MomentAccumulator {
 public:
  void push(double x);
  void merge(const MomentAccumulator& other);
  std::size_t count() const { return n_; }
  // Throws std::invalid_argument when empty.
  Moments result() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct KsResult {
  double statistic = 0.0;
  bool pass_at_01 = false;
};

// One-sample Kolmogorov-Smirnov test against Uniform[0, 1). Passes when
// D < 1.63 / sqrt(n). Throws std::invalid_argument for n < 10 or samples
// outside [0, 1).
KsResult ks_uniform(std::span<const double> samples);

inline constexpr double kKsCritical01 = 1.63;

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
  bool pass_at_01 = false;
};

// Pearson chi-square of in-range counts against equal expected occupancy.
ChiSquareResult chi_square_uniform(const Histogram& h);

struct GaussianFit {
  double mu = 0.0;
  double sigma = 0.0;
  double chi2_reduced = 0.0;
  std::size_t bins_used = 0;
};

// Moment-matched normal from bin centres, then reduced Pearson chi-square
// over bins whose expected count is at least 5 (3 fitted constraints).
// Throws std::invalid_argument when fewer than 1000 samples are in range
// or fewer than 4 bins qualify.
GaussianFit gaussian_fit_check(const Histogram& h);

struct TimePosition {
  double t = 0.0;
  double x = 0.0;
};

// cos(2 pi t[k+1]) * sin(omega x[k]) for consecutive trajectory entries.
std::vector<double> forcing_samples(std::span<const TimePosition> trajectory,
                                    double omega);

// Histogram of forcing_samples over [-1, 1]. Needs >= 1000 entries.
Histogram forcing_histogram(std::span<const TimePosition> trajectory,
                            double omega, std::size_t n_bins);

struct PeakReport {
  std::size_t smoothing_window = 0;
  std::size_t n_peaks = 0;
  std::vector<double> peak_positions;
  std::size_t n_troughs = 0;
  std::vector<double> trough_positions;
};

inline constexpr std::size_t kDefaultPeakWindow = 9;
inline constexpr double kDefaultPeakProminence = 0.2;

// Centred moving average (zero outside the range), then local maxima whose
// topographic prominence is at least `prominence` times the smoothed
// maximum. Troughs are the minima between consecutive accepted peaks.
// window must be odd and smaller than the bin count.
PeakReport count_peaks(const Histogram& h,
                       std::size_t window = kDefaultPeakWindow,
                       double prominence = kDefaultPeakProminence);

// Moving average used by count_peaks, exposed for plotting and tests.
std::vector<double> smooth_counts(const Histogram& h, std::size_t window);

}  // namespace chaosim
