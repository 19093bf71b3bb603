#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "pairforge/core.hpp"

namespace pairforge {

/// One embedded text: the unit of every corpus file.
struct EmbeddingRecord {
  std::string id;
  std::string text;
  Vec vector;

  bool operator==(const EmbeddingRecord&) const = default;
};

/// An immutable set of embedding records sharing one vector dimension.
/// dimension is 0 only when the corpus is empty.
struct Corpus {
  std::vector<EmbeddingRecord> records;
  std::size_t dimension = 0;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  std::vector<Vec> extract_vectors() const {
    std::vector<Vec> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.vector);
    return out;
  }

  /// Content fingerprint (ids, texts, vector bits, length-framed, in order).
  /// Reports carry it so published numbers trace back to the exact corpus.
  std::uint64_t content_digest() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto mix_size = [&h](std::size_t n) {
      const auto v = static_cast<std::uint64_t>(n);
      h = fnv1a64(&v, sizeof v, h);
    };
    for (const auto& r : records) {
      mix_size(r.id.size());
      h = fnv1a64(r.id, h);
      mix_size(r.text.size());
      h = fnv1a64(r.text, h);
      for (double v : r.vector) h = fnv1a64(v, h);
    }
    return h;
  }
};

struct QaItem {
  std::string question;
  std::string answer;

  bool operator==(const QaItem&) const = default;
};

/// A context paragraph with machine-generated question/answer items.
/// qa_items may be empty: such a record cannot yield positives but its
/// paragraph still exists as an alternative context.
struct QaRecord {
  std::string paragraph;
  std::optional<std::string> url;
  std::vector<QaItem> qa_items;

  bool operator==(const QaRecord&) const = default;
};

/// One contrastive training example: a query with texts it should retrieve
/// (positive_pairs) and texts it should not (negative_pairs).
struct TrainingPair {
  std::string query;
  std::vector<std::string> positive_pairs;
  std::vector<std::string> negative_pairs;

  bool operator==(const TrainingPair&) const = default;
};

/// Retrieval test item: a query and the id of its single relevant document.
struct EvalQuery {
  std::string query_id;
  std::string query_text;
  std::string relevant_id;

  bool operator==(const EvalQuery&) const = default;
};

/// Positive and negative texts must not overlap as string sets.
inline void validate_training_pair(const TrainingPair& pair) {
  std::unordered_set<std::string_view> positives(pair.positive_pairs.begin(),
                                                 pair.positive_pairs.end());
  for (const auto& neg : pair.negative_pairs) {
    if (positives.contains(neg))
      throw std::invalid_argument("training pair: text appears in both positive_pairs "
                                  "and negative_pairs: " + neg);
  }
}

}  // namespace pairforge
