#pragma once

// Pairwise-distance distribution diagnostics and the percentile thresholds
// that split it into hard positives (low tail) and hard negatives (high
// tail). Percentiles use linear interpolation over (n-1)-indexed ranks, the
// common convention; it is pinned here so thresholds and goldens are stable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pairforge/core.hpp"
#include "pairforge/rng.hpp"

namespace pairforge {

struct DistanceDistribution {
  std::vector<double> samples;

  std::size_t count() const { return samples.size(); }
};

/// Distance cutoffs at the two percentile ranks. Anything at or below
/// lower_bound is a hard-positive candidate; anything above upper_bound is a
/// hard-negative candidate.
struct ThresholdPair {
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double lower_pct = 5.0;
  double upper_pct = 95.0;
};

/// Distances between `sample_count` uniformly drawn distinct index pairs.
/// Deterministic per seed. The full n^2 distance set is intractable at
/// corpus scale; at the default 100k samples the error on a tail percentile
/// is negligible.
inline DistanceDistribution sample_pairwise_distances(std::span<const Vec> points,
                                                      std::size_t sample_count,
                                                      std::uint64_t seed) {
  if (points.size() < 2)
    throw std::invalid_argument("sample_pairwise_distances: corpus has fewer than 2 points");
  if (sample_count == 0)
    throw std::invalid_argument("sample_pairwise_distances: sample_count must be positive");
  Rng rng(seed, 0x57a75);
  DistanceDistribution dist;
  dist.samples.reserve(sample_count);
  const std::uint64_t n = points.size();
  for (std::size_t s = 0; s < sample_count; ++s) {
    const auto i = static_cast<std::size_t>(rng.next_below(n));
    auto j = static_cast<std::size_t>(rng.next_below(n - 1));
    if (j >= i) ++j;  // uniform over distinct pairs
    dist.samples.push_back(euclidean_distance(points[i], points[j]));
  }
  return dist;
}

namespace detail {

/// Percentile of an already-sorted sample vector: rank r = p/100 * (n-1),
/// linear interpolation between the two bracketing order statistics.
inline double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty())
    throw std::invalid_argument("percentile: empty distribution");
  if (!(p >= 0.0 && p <= 100.0))
    throw std::invalid_argument("percentile: rank " + std::to_string(p) +
                                " outside [0, 100]");
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

inline double percentile(const DistanceDistribution& dist, double p) {
  std::vector<double> sorted = dist.samples;
  std::sort(sorted.begin(), sorted.end());
  return detail::percentile_sorted(sorted, p);
}

inline double mean(const DistanceDistribution& dist) {
  if (dist.samples.empty())
    throw std::invalid_argument("mean: empty distribution");
  double sum = 0.0;
  for (double v : dist.samples) sum += v;
  return sum / static_cast<double>(dist.samples.size());
}

/// Adjusted Fisher-Pearson standardized third moment:
///   G1 = sqrt(n(n-1)) / (n-2) * m3 / m2^(3/2)
/// Negative values confirm the left-skewed shape the mining thresholds rely
/// on being reported honestly rather than assumed.
inline double skewness(const DistanceDistribution& dist) {
  const std::size_t n = dist.samples.size();
  if (n < 3)
    throw std::invalid_argument("skewness: needs at least 3 samples");
  const double mu = mean(dist);
  double m2 = 0.0, m3 = 0.0;
  for (double v : dist.samples) {
    const double d = v - mu;
    m2 += d * d;
    m3 += d * d * d;
  }
  const auto dn = static_cast<double>(n);
  m2 /= dn;
  m3 /= dn;
  if (m2 <= 1e-24 * std::max(1.0, mu * mu))
    throw std::invalid_argument("skewness: degenerate variance");
  const double g1 = m3 / std::pow(m2, 1.5);
  return g1 * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0);
}

inline ThresholdPair compute_thresholds(const DistanceDistribution& dist,
                                        double lower_pct, double upper_pct) {
  if (!(lower_pct < upper_pct))
    throw std::invalid_argument("compute_thresholds: lower_pct must be below upper_pct");
  std::vector<double> sorted = dist.samples;
  std::sort(sorted.begin(), sorted.end());
  ThresholdPair t;
  t.lower_pct = lower_pct;
  t.upper_pct = upper_pct;
  t.lower_bound = detail::percentile_sorted(sorted, lower_pct);
  t.upper_bound = detail::percentile_sorted(sorted, upper_pct);
  return t;
}

}  // namespace pairforge
