#pragma once

// Synthetic QA records -> validated contrastive training pairs.
//
// A QA item survives validation only when at least `threshold` of its
// answer's distinct tokens also occur in the source paragraph; the boundary
// is inclusive (overlap == threshold is accepted). Surviving questions
// become positives for their paragraph; negatives are drawn from the QA
// strings of other records, never from the query's own record.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pairforge/core.hpp"
#include "pairforge/records.hpp"
#include "pairforge/rng.hpp"

namespace pairforge {

struct OverlapConfig {
  double threshold = 0.6;
};

enum class NegativeSource { questions_and_answers, questions_only };

struct PairAssemblyConfig {
  std::size_t positives_per_query = 0;  // 0 keeps every accepted question
  std::size_t negatives_per_query = 3;
  std::uint64_t seed = 42;
  NegativeSource negative_source = NegativeSource::questions_and_answers;
};

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

// Decodes the next UTF-8 code point; malformed bytes fall back to Latin-1 so
// tokenization never throws on odd input.
inline std::uint32_t next_codepoint(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  std::uint32_t cp = b0;
  if (b0 >= 0xf0) {
    len = 4;
    cp = b0 & 0x07;
  } else if (b0 >= 0xe0) {
    len = 3;
    cp = b0 & 0x0f;
  } else if (b0 >= 0xc0) {
    len = 2;
    cp = b0 & 0x1f;
  }
  if (len == 1 || i + len > s.size()) {
    ++i;
    return cp;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto bk = static_cast<unsigned char>(s[i + k]);
    if ((bk & 0xc0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3f);
  }
  i += len;
  return cp;
}

// Word characters: ASCII alphanumerics (lowercased), Latin-1 letters
// (case-folded), and any code point >= U+0100 outside the General
// Punctuation block. No stemming, no stopwords: Malay morphology makes
// stemming risky and the overlap rule does not need it.
inline bool classify_word_char(std::uint32_t cp, std::uint32_t& folded) {
  if (cp < 0x80) {
    if ((cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z')) {
      folded = cp;
      return true;
    }
    if (cp >= 'A' && cp <= 'Z') {
      folded = cp + 0x20;
      return true;
    }
    return false;
  }
  if (cp < 0xc0) return false;                    // C1 controls, Latin-1 punctuation
  if (cp == 0xd7 || cp == 0xf7) return false;     // multiply / divide signs
  if (cp >= 0x2000 && cp <= 0x206f) return false; // general punctuation
  folded = (cp >= 0xc0 && cp <= 0xde) ? cp + 0x20 : cp;
  return true;
}

}  // namespace detail

/// Lowercases and splits on any run of non-alphanumeric characters; empty
/// tokens are dropped. The rule is idempotent: tokenizing the joined tokens
/// yields the same token list.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::uint32_t cp = detail::next_codepoint(text, i);
    std::uint32_t folded = 0;
    if (detail::classify_word_char(cp, folded)) {
      detail::append_utf8(current, folded);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// Fraction of the answer's distinct tokens that occur in the context's
/// token set. 0 when the answer has no tokens.
inline double keyword_overlap(std::string_view answer, std::string_view context) {
  const auto answer_tokens = tokenize(answer);
  if (answer_tokens.empty()) return 0.0;
  std::unordered_set<std::string> distinct(answer_tokens.begin(), answer_tokens.end());
  const auto context_tokens = tokenize(context);
  const std::unordered_set<std::string> context_set(context_tokens.begin(),
                                                    context_tokens.end());
  std::size_t hits = 0;
  for (const auto& tok : distinct)
    if (context_set.contains(tok)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(distinct.size());
}

struct ScoredQaItem {
  QaItem item;
  double overlap = 0.0;
};

struct ValidatedRecord {
  std::vector<QaItem> accepted;
  std::vector<ScoredQaItem> rejected;
};

inline ValidatedRecord validate_record(const QaRecord& record, const OverlapConfig& config) {
  if (!(config.threshold > 0.0 && config.threshold <= 1.0))
    throw std::invalid_argument("overlap threshold outside (0, 1]");
  ValidatedRecord out;
  for (const auto& item : record.qa_items) {
    const double overlap = keyword_overlap(item.answer, record.paragraph);
    if (overlap >= config.threshold) {
      out.accepted.push_back(item);
    } else {
      out.rejected.push_back({item, overlap});
    }
  }
  return out;
}

struct RejectedItem {
  std::size_t record_index = 0;
  QaItem item;
  double overlap = 0.0;
};

struct RagBuildResult {
  std::vector<TrainingPair> pairs;
  std::size_t records_skipped = 0;  // records with no accepted qa item
  std::vector<RejectedItem> rejected;
};

/// One TrainingPair per record with at least one accepted item: the
/// paragraph is the query and its accepted questions are the positives, so
/// the pair trains long-context -> short-question retrieval. Negatives are
/// sampled (deterministically, one stream per record) from other records'
/// strings; any string that also occurs in the query's own record is
/// excluded, which keeps provenance clean and the positive/negative sets
/// disjoint.
inline RagBuildResult build_pairs(std::span<const QaRecord> records,
                                  const PairAssemblyConfig& assembly,
                                  const OverlapConfig& overlap) {
  if (records.size() < 2)
    throw std::invalid_argument("build_pairs: need at least 2 records for negatives");
  if (assembly.negatives_per_query == 0)
    throw std::invalid_argument("build_pairs: negatives_per_query must be at least 1");

  std::vector<ValidatedRecord> validated;
  validated.reserve(records.size());
  for (const auto& rec : records) validated.push_back(validate_record(rec, overlap));

  // Deduplicated negative pool, tagged with the records each string occurs in.
  struct PoolEntry {
    std::string_view text;
    std::unordered_set<std::size_t> sources;
  };
  std::vector<PoolEntry> pool;
  std::unordered_map<std::string_view, std::size_t> pool_index;
  auto add_to_pool = [&](std::string_view text, std::size_t source) {
    if (text.empty()) return;
    auto [it, inserted] = pool_index.try_emplace(text, pool.size());
    if (inserted) pool.push_back({text, {}});
    pool[it->second].sources.insert(source);
  };
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (const auto& item : records[r].qa_items) {
      add_to_pool(item.question, r);
      if (assembly.negative_source == NegativeSource::questions_and_answers)
        add_to_pool(item.answer, r);
    }
  }

  RagBuildResult result;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (const auto& rej : validated[r].rejected)
      result.rejected.push_back({r, rej.item, rej.overlap});
    if (validated[r].accepted.empty()) {
      ++result.records_skipped;
      continue;
    }
    TrainingPair pair;
    pair.query = records[r].paragraph;
    for (const auto& item : validated[r].accepted) {
      pair.positive_pairs.push_back(item.question);
      if (assembly.positives_per_query != 0 &&
          pair.positive_pairs.size() >= assembly.positives_per_query)
        break;
    }
    std::vector<std::size_t> eligible;
    for (std::size_t e = 0; e < pool.size(); ++e)
      if (!pool[e].sources.contains(r)) eligible.push_back(e);
    if (eligible.empty()) {
      ++result.records_skipped;
      continue;
    }
    Rng rng(assembly.seed, r);
    const std::size_t take = std::min(assembly.negatives_per_query, eligible.size());
    for (std::size_t pick : sample_without_replacement(rng, eligible.size(), take))
      pair.negative_pairs.push_back(std::string(pool[eligible[pick]].text));
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

}  // namespace pairforge
