#include "chaosim/histogram.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chaosim {

Histogram::Histogram(double lo_, double hi_, std::size_t n_bins)
    : lo(lo_), hi(hi_), counts(n_bins, 0) {
  if (n_bins == 0) throw std::invalid_argument("histogram needs >= 1 bin");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("histogram range must be finite with lo < hi");
  }
}

double Histogram::edge(std::size_t i) const {
  if (i == counts.size()) return hi;
  return lo + bin_width() * static_cast<double>(i);
}

double Histogram::center(std::size_t i) const {
  return lo + bin_width() * (static_cast<double>(i) + 0.5);
}

void Histogram::add(double x) {
  if (std::isnan(x) || x > hi) {
    ++overflow;
    return;
  }
  if (x < lo) {
    ++underflow;
    return;
  }
  const auto n = counts.size();
  auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(n));
  if (idx >= n) idx = n - 1;
  ++counts[idx];
}

std::uint64_t Histogram::in_range() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

bool Histogram::same_binning(const Histogram& other) const {
  return lo == other.lo && hi == other.hi && counts.size() == other.counts.size();
}

Histogram merge_histograms(const Histogram& a, const Histogram& b) {
  if (!a.same_binning(b)) {
    throw std::invalid_argument("merge_histograms: mismatched binning");
  }
  Histogram out = a;
  for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
  out.underflow += b.underflow;
  out.overflow += b.overflow;
  return out;
}

}  // namespace chaosim
