#pragma once

// The hard-mining loop. For each anchor, every corpus point is ranked by
// exact distance; points at or below the lower threshold become hard
// positives, points above the upper threshold become hard negatives, and
// each list is independently down-sampled to max_size. Per-anchor RNG
// streams are seeded by (seed, anchor ordinal), so output is identical
// whether anchors run on one thread or many.

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "pairforge/core.hpp"
#include "pairforge/kdtree.hpp"
#include "pairforge/records.hpp"
#include "pairforge/rng.hpp"
#include "pairforge/stats.hpp"

namespace pairforge {

struct MiningConfig {
  ThresholdPair thresholds;
  std::size_t max_size = 5;
  std::uint64_t seed = 42;
  // The anchor itself always sits at distance 0 <= lower_bound; pairing a
  // text with itself is a vacuous positive, so it is excluded by default.
  // Distinct records with identical vectors are legitimate and kept.
  bool exclude_self = true;
};

struct MinedPairs {
  std::size_t anchor_ordinal = 0;
  std::vector<std::size_t> positive_ordinals;
  std::vector<std::size_t> negative_ordinals;
};

namespace detail {

inline std::vector<std::size_t> downsample(Rng& rng, std::vector<std::size_t>& candidates,
                                           std::size_t max_size) {
  if (candidates.size() <= max_size) return std::move(candidates);
  const auto picks = sample_without_replacement(rng, candidates.size(), max_size);
  std::vector<std::size_t> out;
  out.reserve(max_size);
  for (std::size_t p : picks) out.push_back(candidates[p]);
  return out;
}

}  // namespace detail

/// Threshold selection over an already-computed neighbour list (ascending by
/// distance, as query_all returns). Positives are sampled before negatives
/// from the per-anchor stream.
inline MinedPairs select_pairs(std::span<const Neighbor> neighbors,
                               std::size_t anchor_ordinal, const MiningConfig& config) {
  if (config.max_size == 0)
    throw std::invalid_argument("mining: max_size must be at least 1");
  std::vector<std::size_t> pos, neg;
  for (const auto& nb : neighbors) {
    if (nb.distance <= config.thresholds.lower_bound) {
      if (config.exclude_self && nb.ordinal == anchor_ordinal) continue;
      pos.push_back(nb.ordinal);
    } else if (nb.distance > config.thresholds.upper_bound) {
      neg.push_back(nb.ordinal);
    }
  }
  Rng rng(config.seed, anchor_ordinal);
  MinedPairs mined;
  mined.anchor_ordinal = anchor_ordinal;
  mined.positive_ordinals = detail::downsample(rng, pos, config.max_size);
  mined.negative_ordinals = detail::downsample(rng, neg, config.max_size);
  return mined;
}

inline MinedPairs mine_anchor(const KnnIndex& index, std::size_t anchor_ordinal,
                              const MiningConfig& config) {
  const auto neighbors = index.query_all(index.point(anchor_ordinal));
  return select_pairs(neighbors, anchor_ordinal, config);
}

struct MineOptions {
  unsigned threads = 1;
  bool brute_force = false;  // full-scan ranking instead of the KD-tree
};

struct MiningResult {
  std::vector<MinedPairs> mined;       // anchors with >= 1 positive and >= 1 negative
  std::vector<TrainingPair> pairs;     // same anchors, projected to texts
  std::size_t anchors_processed = 0;
  std::size_t anchors_dropped = 0;
};

/// Mines every anchor of the corpus and assembles text-level training pairs.
/// Anchors lacking a positive or a negative are dropped and counted; partial
/// pairs are never emitted.
inline MiningResult mine_corpus(const Corpus& corpus, const MiningConfig& config,
                                const MineOptions& options = {}) {
  if (corpus.size() < 2)
    throw std::invalid_argument("mine_corpus: corpus has fewer than 2 records");
  const std::vector<Vec> vectors = corpus.extract_vectors();
  std::optional<KnnIndex> index;
  if (!options.brute_force) index = KnnIndex::build(vectors);

  const std::size_t n = corpus.size();
  std::vector<MinedPairs> per_anchor(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t a = next.fetch_add(1);
      if (a >= n) return;
      const auto neighbors = options.brute_force
                                 ? brute_force_all(vectors, vectors[a])
                                 : index->query_all(index->point(a));
      per_anchor[a] = select_pairs(neighbors, a, config);
    }
  };
  const unsigned thread_count = std::max(1u, options.threads);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  MiningResult result;
  result.anchors_processed = n;
  for (std::size_t a = 0; a < n; ++a) {
    auto& mined = per_anchor[a];
    if (mined.positive_ordinals.empty() || mined.negative_ordinals.empty()) {
      ++result.anchors_dropped;
      continue;
    }
    TrainingPair pair;
    pair.query = corpus.records[a].text;
    std::unordered_set<std::string_view> pos_texts;
    for (std::size_t p : mined.positive_ordinals) {
      pair.positive_pairs.push_back(corpus.records[p].text);
      pos_texts.insert(corpus.records[p].text);
    }
    for (std::size_t q : mined.negative_ordinals) {
      // Only reachable when two records carry the same text but different
      // vectors; keep the pair's positive/negative sets disjoint.
      if (pos_texts.contains(corpus.records[q].text)) continue;
      pair.negative_pairs.push_back(corpus.records[q].text);
    }
    if (pair.negative_pairs.empty()) {
      ++result.anchors_dropped;
      continue;
    }
    result.mined.push_back(std::move(mined));
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

/// Mixes `round(mined_fraction * |synthetic|)` mined records into a dataset
/// of the synthetic set's size. Both contributions are sampled without
/// replacement and the result is shuffled, all deterministically per seed.
inline std::vector<TrainingPair> blend_datasets(std::span<const TrainingPair> synthetic,
                                                std::span<const TrainingPair> mined,
                                                double mined_fraction, std::uint64_t seed) {
  if (!(mined_fraction >= 0.0 && mined_fraction <= 1.0))
    throw std::invalid_argument("blend_datasets: mined_fraction outside [0, 1]");
  const auto want_mined = static_cast<std::size_t>(
      std::llround(mined_fraction * static_cast<double>(synthetic.size())));
  if (want_mined > mined.size())
    throw std::invalid_argument("blend_datasets: need " + std::to_string(want_mined) +
                                " mined records but only " + std::to_string(mined.size()) +
                                " available");
  const std::size_t want_synth = synthetic.size() - want_mined;

  std::vector<TrainingPair> out;
  out.reserve(synthetic.size());
  Rng rng(seed, 0xb1e7d);
  for (std::size_t i : sample_without_replacement(rng, mined.size(), want_mined))
    out.push_back(mined[i]);
  for (std::size_t i : sample_without_replacement(rng, synthetic.size(), want_synth))
    out.push_back(synthetic[i]);
  shuffle(rng, out);
  return out;
}

}  // namespace pairforge
