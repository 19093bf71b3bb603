#pragma once

// Line-delimited JSON readers and writers for the four record formats:
//
//   corpus.jsonl  {"id": str, "text": str, "vector": [float, ...]}
//   qa.jsonl      {"paragraph": str, "url": str, "qa": {"qa": [{question, answer}, ...]}}
//                 (a flat "qa": [...] list is also accepted; writes emit flat)
//   pairs.jsonl   {"query": str, "positive_pairs": [str, ...], "negative_pairs": [str, ...]}
//   eval.jsonl    {"query_id": str, "query_text": str, "relevant_id": str}
//
// Writers use a fixed field order and the shortest float representation that
// round-trips, so identical input always produces byte-identical output.

#include <cmath>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pairforge/core.hpp"
#include "pairforge/records.hpp"

namespace pairforge {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string loc(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

inline ordered_json parse_line(const std::string& line, const std::string& path,
                               std::size_t line_no) {
  try {
    return ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(loc(path, line_no) + ": malformed line: " + e.what());
  }
}

inline std::string require_string(const ordered_json& j, const char* field,
                                  const std::string& path, std::size_t line_no) {
  if (!j.contains(field) || !j[field].is_string())
    throw ParseError(loc(path, line_no) + ": missing or non-string field '" +
                     field + "'");
  return j[field].get<std::string>();
}

inline std::vector<std::string> require_string_array(const ordered_json& j,
                                                     const char* field,
                                                     const std::string& path,
                                                     std::size_t line_no) {
  if (!j.contains(field) || !j[field].is_array())
    throw ParseError(loc(path, line_no) + ": missing or non-array field '" +
                     field + "'");
  std::vector<std::string> out;
  out.reserve(j[field].size());
  for (const auto& item : j[field]) {
    if (!item.is_string())
      throw ParseError(loc(path, line_no) + ": non-string entry in '" + field + "'");
    out.push_back(item.get<std::string>());
  }
  return out;
}

inline std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

inline bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

// Applies fn(parsed json, line number) to every non-blank line.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  auto in = open_for_read(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    fn(parse_line(line, path, line_no), line_no);
  }
}

}  // namespace detail

inline Corpus read_embedding_corpus(const std::string& path) {
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  detail::for_each_line(path, [&](const ordered_json& j, std::size_t line_no) {
    EmbeddingRecord rec;
    rec.id = detail::require_string(j, "id", path, line_no);
    if (rec.id.empty())
      throw ParseError(detail::loc(path, line_no) + ": empty id");
    if (!seen_ids.insert(rec.id).second)
      throw ParseError(detail::loc(path, line_no) + ": duplicate id '" + rec.id + "'");
    rec.text = detail::require_string(j, "text", path, line_no);
    if (!j.contains("vector") || !j["vector"].is_array())
      throw ParseError(detail::loc(path, line_no) + ": missing or non-array field 'vector'");
    for (const auto& v : j["vector"]) {
      if (!v.is_number())
        throw ParseError(detail::loc(path, line_no) + ": non-numeric vector component");
      const double x = v.get<double>();
      if (!std::isfinite(x))
        throw ParseError(detail::loc(path, line_no) + ": non-finite vector component");
      rec.vector.push_back(x);
    }
    if (rec.vector.empty())
      throw ParseError(detail::loc(path, line_no) + ": empty vector");
    if (corpus.records.empty()) {
      corpus.dimension = rec.vector.size();
    } else if (rec.vector.size() != corpus.dimension) {
      throw ParseError(detail::loc(path, line_no) + ": vector dimension " +
                       std::to_string(rec.vector.size()) + " differs from corpus dimension " +
                       std::to_string(corpus.dimension));
    }
    corpus.records.push_back(std::move(rec));
  });
  if (corpus.records.empty())
    std::cerr << "warning: " << path << ": empty corpus, dimension undefined\n";
  return corpus;
}

inline void write_embedding_corpus(const std::string& path, const Corpus& corpus) {
  auto out = detail::open_for_write(path);
  for (const auto& rec : corpus.records) {
    ordered_json j;
    j["id"] = rec.id;
    j["text"] = rec.text;
    j["vector"] = rec.vector;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline std::vector<QaRecord> read_qa_records(const std::string& path) {
  std::vector<QaRecord> records;
  detail::for_each_line(path, [&](const ordered_json& j, std::size_t line_no) {
    QaRecord rec;
    rec.paragraph = detail::require_string(j, "paragraph", path, line_no);
    if (rec.paragraph.empty())
      throw ParseError(detail::loc(path, line_no) + ": empty paragraph");
    if (j.contains("url")) {
      if (!j["url"].is_string())
        throw ParseError(detail::loc(path, line_no) + ": non-string field 'url'");
      rec.url = j["url"].get<std::string>();
    }
    if (j.contains("qa")) {
      // Accept both the nested {"qa": {"qa": [...]}} shape and a flat list.
      const ordered_json* items = &j["qa"];
      if (items->is_object()) {
        if (!items->contains("qa") || !(*items)["qa"].is_array())
          throw ParseError(detail::loc(path, line_no) + ": 'qa' object lacks inner 'qa' array");
        items = &(*items)["qa"];
      } else if (!items->is_array()) {
        throw ParseError(detail::loc(path, line_no) + ": field 'qa' must be an array or object");
      }
      for (const auto& item : *items) {
        if (!item.is_object())
          throw ParseError(detail::loc(path, line_no) + ": non-object qa entry");
        QaItem qa;
        qa.question = detail::require_string(item, "question", path, line_no);
        qa.answer = detail::require_string(item, "answer", path, line_no);
        rec.qa_items.push_back(std::move(qa));
      }
    }
    records.push_back(std::move(rec));
  });
  return records;
}

inline void write_qa_records(const std::string& path, std::span<const QaRecord> records) {
  auto out = detail::open_for_write(path);
  for (const auto& rec : records) {
    ordered_json j;
    j["paragraph"] = rec.paragraph;
    if (rec.url) j["url"] = *rec.url;
    auto items = ordered_json::array();
    for (const auto& qa : rec.qa_items) {
      ordered_json item;
      item["question"] = qa.question;
      item["answer"] = qa.answer;
      items.push_back(std::move(item));
    }
    j["qa"] = std::move(items);
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline std::vector<TrainingPair> read_pairs(const std::string& path) {
  std::vector<TrainingPair> pairs;
  detail::for_each_line(path, [&](const ordered_json& j, std::size_t line_no) {
    TrainingPair pair;
    pair.query = detail::require_string(j, "query", path, line_no);
    pair.positive_pairs = detail::require_string_array(j, "positive_pairs", path, line_no);
    pair.negative_pairs = detail::require_string_array(j, "negative_pairs", path, line_no);
    try {
      validate_training_pair(pair);
    } catch (const std::invalid_argument& e) {
      throw ParseError(detail::loc(path, line_no) + ": " + e.what());
    }
    pairs.push_back(std::move(pair));
  });
  return pairs;
}

inline void write_pairs(const std::string& path, std::span<const TrainingPair> pairs) {
  for (const auto& pair : pairs) validate_training_pair(pair);
  auto out = detail::open_for_write(path);
  for (const auto& pair : pairs) {
    ordered_json j;
    j["query"] = pair.query;
    j["positive_pairs"] = pair.positive_pairs;
    j["negative_pairs"] = pair.negative_pairs;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline std::vector<EvalQuery> read_eval_queries(const std::string& path) {
  std::vector<EvalQuery> queries;
  detail::for_each_line(path, [&](const ordered_json& j, std::size_t line_no) {
    EvalQuery q;
    q.query_id = detail::require_string(j, "query_id", path, line_no);
    q.query_text = detail::require_string(j, "query_text", path, line_no);
    q.relevant_id = detail::require_string(j, "relevant_id", path, line_no);
    if (q.query_id.empty() || q.relevant_id.empty())
      throw ParseError(detail::loc(path, line_no) + ": empty query_id or relevant_id");
    queries.push_back(std::move(q));
  });
  return queries;
}

inline void write_eval_queries(const std::string& path, std::span<const EvalQuery> queries) {
  auto out = detail::open_for_write(path);
  for (const auto& q : queries) {
    ordered_json j;
    j["query_id"] = q.query_id;
    j["query_text"] = q.query_text;
    j["relevant_id"] = q.relevant_id;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace pairforge
