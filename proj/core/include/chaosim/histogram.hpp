#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace chaosim {

// Uniform-bin histogram over [lo, hi]. Bins are half-open except the last,
// which also takes x == hi. Counts are exact integers so shards merge
// without rounding.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  Histogram() = default;
  Histogram(double lo, double hi, std::size_t n_bins);

  std::size_t n_bins() const { return counts.size(); }
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double edge(std::size_t i) const;
  double center(std::size_t i) const;

  // NaN is counted as overflow so that every added sample lands somewhere.
  void add(double x);

  std::uint64_t in_range() const;
  std::uint64_t total() const { return in_range() + underflow + overflow; }

  bool same_binning(const Histogram& other) const;

  bool operator==(const Histogram&) const = default;
};

// Elementwise sum. Throws std::invalid_argument on mismatched binning.
Histogram merge_histograms(const Histogram& a, const Histogram& b);

}  // namespace chaosim
