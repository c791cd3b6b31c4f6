#include "chaosim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "chaosim/maps.hpp"

namespace chaosim {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

namespace {

Moments from_central(std::size_t n, double mean, double s2, double s3,
                     double s4) {
  Moments m;
  m.n = n;
  m.mean = mean;
  m.std = n > 1 ? std::sqrt(s2 / static_cast<double>(n - 1)) : 0.0;
  const double dn = static_cast<double>(n);
  const double m2 = s2 / dn;
  if (n >= 3 && m2 > 0.0) {
    m.skewness = (s3 / dn) / std::pow(m2, 1.5);
    m.excess_kurtosis = (s4 / dn) / (m2 * m2) - 3.0;
  }
  return m;
}

}  // namespace

Moments moments(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("moments: empty sample");
  // Canonical order makes the result independent of sample permutation.
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  CompensatedSum sum;
  for (double x : sorted) sum.add(x);
  const double mean = sum.value() / static_cast<double>(sorted.size());

  CompensatedSum s2, s3, s4;
  for (double x : sorted) {
    const double d = x - mean;
    const double d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  return from_central(sorted.size(), mean, s2.value(), s3.value(), s4.value());
}

void MomentAccumulator::push(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
         4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d2 = delta * delta;
  const double d3 = d2 * delta;
  const double d4 = d2 * d2;

  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                    3.0 * delta * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ +
                    d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * delta * (na * o.m3_ - nb * m3_) / n;
  mean_ += delta * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += o.n_;
}

Moments MomentAccumulator::result() const {
  if (n_ == 0) throw std::invalid_argument("MomentAccumulator: no samples");
  return from_central(n_, mean_, m2_, m3_, m4_);
}

KsResult ks_uniform(std::span<const double> samples) {
  if (samples.size() < 10) {
    throw std::invalid_argument("ks_uniform: need at least 10 samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!(x >= 0.0 && x < 1.0)) {
      throw std::invalid_argument("ks_uniform: sample outside [0, 1)");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double i_d = static_cast<double>(i);
    d = std::max({d, (i_d + 1.0) / n - sorted[i], sorted[i] - i_d / n});
  }
  return {d, d < kKsCritical01 / std::sqrt(n)};
}

ChiSquareResult chi_square_uniform(const Histogram& h) {
  const auto total = h.in_range();
  if (h.n_bins() < 2 || total == 0) {
    throw std::invalid_argument("chi_square_uniform: need >= 2 bins and samples");
  }
  const double expected =
      static_cast<double>(total) / static_cast<double>(h.n_bins());
  double stat = 0.0;
  for (auto c : h.counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  ChiSquareResult r;
  r.statistic = stat;
  r.dof = h.n_bins() - 1;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * stat);
  r.pass_at_01 = r.p_value > 0.01;
  return r;
}

GaussianFit gaussian_fit_check(const Histogram& h) {
  const auto total = h.in_range();
  if (total < 1000) {
    throw std::invalid_argument("gaussian_fit_check: fewer than 1000 counts");
  }
  const double n = static_cast<double>(total);
  CompensatedSum s1;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    s1.add(static_cast<double>(h.counts[i]) * h.center(i));
  }
  const double mu = s1.value() / n;
  CompensatedSum s2;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    const double d = h.center(i) - mu;
    s2.add(static_cast<double>(h.counts[i]) * d * d);
  }
  const double sigma = std::sqrt(s2.value() / (n - 1.0));

  GaussianFit fit;
  fit.mu = mu;
  fit.sigma = sigma;
  if (!(sigma > 0.0)) {
    fit.chi2_reduced = std::numeric_limits<double>::infinity();
    return fit;
  }
  auto cdf = [&](double x) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
  };
  double chi2 = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    const double expected = n * (cdf(h.edge(i + 1)) - cdf(h.edge(i)));
    if (expected < 5.0) continue;
    const double d = static_cast<double>(h.counts[i]) - expected;
    chi2 += d * d / expected;
    ++used;
  }
  if (used < 4) {
    throw std::invalid_argument("gaussian_fit_check: too few usable bins");
  }
  fit.bins_used = used;
  fit.chi2_reduced = chi2 / static_cast<double>(used - 3);
  return fit;
}

std::vector<double> forcing_samples(std::span<const TimePosition> trajectory,
                                    double omega) {
  std::vector<double> out;
  if (trajectory.size() < 2) return out;
  out.reserve(trajectory.size() - 1);
  for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
    out.push_back(std::cos(kTwoPi * trajectory[k + 1].t) *
                  std::sin(omega * trajectory[k].x));
  }
  return out;
}

Histogram forcing_histogram(std::span<const TimePosition> trajectory,
                            double omega, std::size_t n_bins) {
  if (trajectory.size() < 1000) {
    throw std::invalid_argument("forcing_histogram: need >= 1000 entries");
  }
  Histogram h(-1.0, 1.0, n_bins);
  for (double f : forcing_samples(trajectory, omega)) h.add(f);
  return h;
}

std::vector<double> smooth_counts(const Histogram& h, std::size_t window) {
  const std::size_t n = h.n_bins();
  if (window == 0 || window % 2 == 0) {
    throw std::invalid_argument("count_peaks: window must be odd and >= 1");
  }
  if (window >= n) {
    throw std::invalid_argument("count_peaks: window must be smaller than the bin count");
  }
  const std::size_t half = window / 2;
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t acc = 0;
    const std::size_t a = i >= half ? i - half : 0;
    const std::size_t b = std::min(n - 1, i + half);
    for (std::size_t j = a; j <= b; ++j) acc += h.counts[j];
    s[i] = static_cast<double>(acc) / static_cast<double>(window);
  }
  return s;
}

PeakReport count_peaks(const Histogram& h, std::size_t window,
                       double prominence) {
  const std::vector<double> s = smooth_counts(h, window);
  const std::size_t n = s.size();
  const double top = *std::max_element(s.begin(), s.end());

  PeakReport report;
  report.smoothing_window = window;
  if (!(top > 0.0)) return report;
  const double threshold = prominence * top;
  const double width = h.bin_width();
  auto position = [&](std::size_t a, std::size_t b) {
    return h.lo + width * (0.5 * static_cast<double>(a + b) + 0.5);
  };

  struct Run {
    std::size_t a, b;
  };
  std::vector<Run> accepted;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const bool left_lower = i == 0 || s[i - 1] < s[i];
    const bool right_lower = j == n - 1 || s[j + 1] < s[i];
    if (left_lower && right_lower && s[i] > 0.0) {
      // Walk outwards until terrain rises above the peak; the higher of the
      // two side minima is the key col.
      double left_min = s[i];
      for (std::size_t k = i; k-- > 0;) {
        if (s[k] > s[i]) break;
        left_min = std::min(left_min, s[k]);
      }
      double right_min = s[i];
      for (std::size_t k = j + 1; k < n; ++k) {
        if (s[k] > s[i]) break;
        right_min = std::min(right_min, s[k]);
      }
      if (s[i] - std::max(left_min, right_min) >= threshold) {
        accepted.push_back({i, j});
      }
    }
    i = j + 1;
  }

  for (const auto& r : accepted) report.peak_positions.push_back(position(r.a, r.b));
  report.n_peaks = accepted.size();
  for (std::size_t p = 0; p + 1 < accepted.size(); ++p) {
    const std::size_t from = accepted[p].b + 1;
    const std::size_t to = accepted[p + 1].a;  // exclusive
    std::size_t lo = from;
    for (std::size_t k = from; k < to; ++k) {
      if (s[k] < s[lo]) lo = k;
    }
    std::size_t hi = lo;
    while (hi + 1 < to && s[hi + 1] == s[lo]) ++hi;
    report.trough_positions.push_back(position(lo, hi));
  }
  report.n_troughs = report.trough_positions.size();
  return report;
}

}  // namespace chaosim
