#pragma once

// recall@k over a query set against an embedded document corpus. Each query
// names exactly one relevant document; recall@k is the percentage of queries
// whose relevant document ranks within the top k. Ranking is by cosine
// similarity descending or Euclidean distance ascending, ties broken by
// ascending document id so reports are reproducible. The report carries the
// scoring mode and a corpus digest so published numbers stay auditable.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "pairforge/contrastive.hpp"
#include "pairforge/core.hpp"
#include "pairforge/jsonl.hpp"
#include "pairforge/records.hpp"

namespace pairforge {

struct EvalReport {
  std::string dataset_name;
  ScoreMode mode = ScoreMode::cosine;
  std::vector<std::size_t> k_values{1, 3, 5, 10};
  std::map<std::size_t, double> recall_at;  // k -> percentage in [0, 100]
  std::size_t query_count = 0;
  std::string corpus_digest;
  bool projected = false;  // true when a trained head was applied
};

struct QueryVector {
  std::string query_id;
  Vec vector;
  std::string relevant_id;
};

struct PerQueryRank {
  std::string query_id;
  std::size_t rank = 0;  // 1-based rank of the relevant document
};

struct EvalOptions {
  std::vector<std::size_t> k_values{1, 3, 5, 10};
  ScoreMode mode = ScoreMode::cosine;
  std::string dataset_name;
  const ProjectionHead* head = nullptr;  // optional projection of both sides
  unsigned threads = 1;  // queries are independent; aggregation stays ordered
};

namespace detail {

// Cosine always renormalizes, even when inputs claim unit norm; a zero
// vector scores 0 against everything rather than NaN.
inline double rank_score(std::span<const double> a, std::span<const double> b,
                         ScoreMode mode) {
  if (mode == ScoreMode::euclidean) return euclidean_distance(a, b);
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

inline bool better(double candidate, std::string_view candidate_id, double reference,
                   std::string_view reference_id, ScoreMode mode) {
  if (candidate != reference)
    return mode == ScoreMode::cosine ? candidate > reference : candidate < reference;
  return candidate_id < reference_id;
}

}  // namespace detail

struct EvalOutcome {
  EvalReport report;
  std::vector<PerQueryRank> ranks;
};

inline EvalOutcome evaluate(std::span<const QueryVector> queries, const Corpus& docs,
                            const EvalOptions& options = {}) {
  if (queries.empty()) throw std::invalid_argument("evaluate: no queries");
  if (docs.empty()) throw std::invalid_argument("evaluate: empty document corpus");
  for (std::size_t k : options.k_values) {
    if (k == 0 || k > docs.size())
      throw std::invalid_argument("evaluate: k=" + std::to_string(k) +
                                  " out of range [1, " + std::to_string(docs.size()) + "]");
  }
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < docs.size(); ++i) by_id.emplace(docs.records[i].id, i);

  std::vector<Vec> doc_vectors;
  doc_vectors.reserve(docs.size());
  for (const auto& rec : docs.records)
    doc_vectors.push_back(options.head ? options.head->project(rec.vector) : rec.vector);

  // Resolve every query up front so errors do not depend on thread timing.
  std::vector<std::size_t> relevant_ordinal(queries.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const auto rel = by_id.find(queries[qi].relevant_id);
    if (rel == by_id.end())
      throw ParseError("evaluate: relevant_id '" + queries[qi].relevant_id +
                       "' of query '" + queries[qi].query_id +
                       "' not found in document corpus");
    relevant_ordinal[qi] = rel->second;
  }

  std::vector<std::size_t> rank_of(queries.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> dim_mismatch{false};
  auto worker = [&] {
    while (true) {
      const std::size_t qi = next.fetch_add(1);
      if (qi >= queries.size()) return;
      const auto& q = queries[qi];
      const Vec qvec = options.head ? options.head->project(q.vector) : q.vector;
      if (qvec.size() != doc_vectors[0].size()) {
        dim_mismatch.store(true);
        return;
      }
      const std::size_t rel = relevant_ordinal[qi];
      const double rel_score = detail::rank_score(qvec, doc_vectors[rel], options.mode);
      std::size_t ahead = 0;
      for (std::size_t i = 0; i < doc_vectors.size(); ++i) {
        if (i == rel) continue;
        const double s = detail::rank_score(qvec, doc_vectors[i], options.mode);
        if (detail::better(s, docs.records[i].id, rel_score, q.relevant_id, options.mode))
          ++ahead;
      }
      rank_of[qi] = ahead + 1;
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
  if (dim_mismatch.load())
    throw std::invalid_argument("evaluate: query dimension mismatch");

  EvalOutcome outcome;
  outcome.ranks.reserve(queries.size());
  std::map<std::size_t, std::size_t> hits;
  for (std::size_t k : options.k_values) hits[k] = 0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    outcome.ranks.push_back({queries[qi].query_id, rank_of[qi]});
    for (std::size_t k : options.k_values)
      if (rank_of[qi] <= k) ++hits[k];
  }

  outcome.report.dataset_name = options.dataset_name;
  outcome.report.mode = options.mode;
  outcome.report.k_values = options.k_values;
  outcome.report.query_count = queries.size();
  outcome.report.corpus_digest = "fnv1a64:" + to_hex(docs.content_digest());
  outcome.report.projected = options.head != nullptr;
  for (std::size_t k : options.k_values)
    outcome.report.recall_at[k] =
        100.0 * static_cast<double>(hits[k]) / static_cast<double>(queries.size());
  return outcome;
}

/// File-level wiring: query vectors are resolved by query_id against the
/// query-embedding corpus, relevance against the document corpus.
inline EvalOutcome evaluate_from_files(const std::string& eval_path,
                                       const std::string& query_corpus_path,
                                       const std::string& doc_corpus_path,
                                       EvalOptions options = {}) {
  const auto eval_queries = read_eval_queries(eval_path);
  const Corpus query_corpus = read_embedding_corpus(query_corpus_path);
  const Corpus doc_corpus = read_embedding_corpus(doc_corpus_path);
  std::unordered_map<std::string_view, const Vec*> query_vec;
  for (const auto& rec : query_corpus.records) query_vec.emplace(rec.id, &rec.vector);
  std::vector<QueryVector> queries;
  queries.reserve(eval_queries.size());
  for (const auto& q : eval_queries) {
    const auto it = query_vec.find(q.query_id);
    if (it == query_vec.end())
      throw ParseError(eval_path + ": query_id '" + q.query_id +
                       "' has no embedding in " + query_corpus_path);
    queries.push_back({q.query_id, *it->second, q.relevant_id});
  }
  if (options.dataset_name.empty())
    options.dataset_name = std::filesystem::path(eval_path).stem().string();
  return evaluate(queries, doc_corpus, options);
}

/// report.json with percentages rounded to two decimals (table formatting).
inline void write_report(const std::string& path, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["dataset_name"] = report.dataset_name;
  j["mode"] = to_string(report.mode);
  j["query_count"] = report.query_count;
  j["k_values"] = report.k_values;
  auto recall = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.recall_at)
    recall[std::to_string(k)] = std::round(v * 100.0) / 100.0;
  j["recall_at"] = std::move(recall);
  j["corpus_digest"] = report.corpus_digest;
  j["projected"] = report.projected;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline void write_ranks(const std::string& path, std::span<const PerQueryRank> ranks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& r : ranks) {
    nlohmann::ordered_json j;
    j["query_id"] = r.query_id;
    j["rank_of_relevant"] = r.rank;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace pairforge
