#pragma once

// Embedding providers: a generic HTTP client for the de-facto embeddings API
// shape, and a deterministic offline provider for network-free runs.
//
// Wire protocol: POST {endpoint_url} with {"input": [texts...], "model": m}
// and an Authorization bearer header; the response carries
// {"data": [{"embedding": [...], "index": i}, ...]} where index is the
// position within the request batch. Results are reassembled by index, so
// output order always matches input order. Transient failures (connection
// errors, HTTP 429, 5xx) are retried with exponential backoff and full
// jitter; authentication failures are not.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "pairforge/core.hpp"
#include "pairforge/jsonl.hpp"
#include "pairforge/records.hpp"
#include "pairforge/rng.hpp"

namespace pairforge {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// One finite vector per text, order-aligned with the input.
  virtual std::vector<Vec> embed(const std::vector<std::string>& texts) = 0;

  /// How many records embed_corpus_file should process between flushes.
  virtual std::size_t preferred_chunk() const { return 256; }
};

/// Hash-seeded unit vectors: the same text always maps to the same vector
/// and distinct texts collide with negligible probability. Exercises every
/// downstream module without a network.
class OfflineProvider final : public EmbeddingProvider {
 public:
  OfflineProvider(std::size_t dimension, std::uint64_t seed)
      : dimension_(dimension), seed_(seed) {
    if (dimension_ == 0)
      throw std::invalid_argument("OfflineProvider: dimension must be positive");
  }

  std::vector<Vec> embed(const std::vector<std::string>& texts) override {
    std::vector<Vec> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
      if (text.empty())
        throw std::invalid_argument("embed: empty text");
      Rng rng(seed_, fnv1a64(text));
      Vec v(dimension_);
      for (auto& x : v) x = rng.next_gaussian();
      const double n = norm(v);
      if (n > 0.0)
        for (auto& x : v) x /= n;
      else
        v[0] = 1.0;
      out.push_back(std::move(v));
    }
    return out;
  }

  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

struct ProviderConfig {
  std::string endpoint_url;
  std::string model_name;
  std::string api_key;  // from the environment; never logged or serialized
  std::size_t batch_size = 32;
  int max_retries = 3;
  double timeout_seconds = 30.0;
  double backoff_base_seconds = 1.0;
  std::size_t concurrency = 4;
};

class HttpProvider final : public EmbeddingProvider {
 public:
  explicit HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    if (config_.endpoint_url.empty())
      throw std::invalid_argument("HttpProvider: endpoint_url must be non-empty");
    if (config_.batch_size == 0)
      throw std::invalid_argument("HttpProvider: batch_size must be at least 1");
    const auto scheme_end = config_.endpoint_url.find("://");
    if (scheme_end == std::string::npos)
      throw std::invalid_argument("HttpProvider: endpoint_url needs a scheme");
    const auto path_start = config_.endpoint_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_url_ = config_.endpoint_url;
      path_ = "/";
    } else {
      base_url_ = config_.endpoint_url.substr(0, path_start);
      path_ = config_.endpoint_url.substr(path_start);
    }
  }

  std::vector<Vec> embed(const std::vector<std::string>& texts) override {
    for (const auto& t : texts)
      if (t.empty()) throw std::invalid_argument("embed: empty text");
    std::vector<Vec> out(texts.size());
    if (texts.empty()) return out;

    const std::size_t batch_count =
        (texts.size() + config_.batch_size - 1) / config_.batch_size;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
      while (!stop.load()) {
        const std::size_t batch = next.fetch_add(1);
        if (batch >= batch_count) return;
        const std::size_t begin = batch * config_.batch_size;
        const std::size_t end = std::min(begin + config_.batch_size, texts.size());
        try {
          embed_batch(texts, begin, end, batch, out);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          stop.store(true);
          return;
        }
      }
    };

    const std::size_t workers =
        std::min(std::max<std::size_t>(1, config_.concurrency), batch_count);
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::size_t dim = out.empty() ? 0 : out[0].size();
    for (const auto& v : out)
      if (v.size() != dim)
        throw IoError("embeddings response: inconsistent dimensions across batches (" +
                      std::to_string(dim) + " vs " + std::to_string(v.size()) + ")");
    return out;
  }

  std::size_t preferred_chunk() const override {
    return config_.batch_size * std::max<std::size_t>(1, config_.concurrency);
  }

 private:
  void embed_batch(const std::vector<std::string>& texts, std::size_t begin,
                   std::size_t end, std::size_t batch_index, std::vector<Vec>& out) {
    nlohmann::json body;
    body["input"] = std::vector<std::string>(texts.begin() + static_cast<long>(begin),
                                             texts.begin() + static_cast<long>(end));
    body["model"] = config_.model_name;
    const std::string payload = body.dump();

    Rng jitter(0xbac0ff, batch_index);
    for (int attempt = 0;; ++attempt) {
      httplib::Client client(base_url_);
      const auto timeout = std::chrono::milliseconds(
          static_cast<long>(config_.timeout_seconds * 1000.0));
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      httplib::Headers headers;
      if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

      auto res = client.Post(path_, headers, payload, "application/json");
      std::string failure;
      if (!res) {
        failure = "connection failed: " + httplib::to_string(res.error());
      } else if (res->status == 401 || res->status == 403) {
        throw IoError("embeddings request: authentication failed (HTTP " +
                      std::to_string(res->status) + ")");
      } else if (res->status == 429 || res->status >= 500) {
        failure = "HTTP " + std::to_string(res->status);
      } else if (res->status != 200) {
        throw IoError("embeddings request failed: HTTP " + std::to_string(res->status));
      } else {
        parse_batch_response(res->body, begin, end, out);
        return;
      }
      if (attempt >= config_.max_retries)
        throw IoError("embeddings request failed after " +
                      std::to_string(config_.max_retries) + " retries: " + failure);
      // Full jitter: uniform in [0, base * 2^attempt).
      const double cap = config_.backoff_base_seconds * std::pow(2.0, attempt);
      std::this_thread::sleep_for(std::chrono::duration<double>(jitter.next_unit() * cap));
    }
  }

  void parse_batch_response(const std::string& body, std::size_t begin, std::size_t end,
                            std::vector<Vec>& out) const {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("malformed embeddings response: ") + e.what());
    }
    if (!j.contains("data") || !j["data"].is_array())
      throw IoError("malformed embeddings response: missing 'data' array");
    const std::size_t expected = end - begin;
    if (j["data"].size() != expected)
      throw IoError("malformed embeddings response: got " +
                    std::to_string(j["data"].size()) + " embeddings for " +
                    std::to_string(expected) + " inputs");
    std::vector<bool> seen(expected, false);
    for (const auto& entry : j["data"]) {
      if (!entry.contains("index") || !entry["index"].is_number_integer() ||
          !entry.contains("embedding") || !entry["embedding"].is_array())
        throw IoError("malformed embeddings response: bad data entry");
      const auto idx = entry["index"].get<long long>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= expected)
        throw IoError("malformed embeddings response: index " + std::to_string(idx) +
                      " out of range");
      if (seen[static_cast<std::size_t>(idx)])
        throw IoError("malformed embeddings response: duplicate index " +
                      std::to_string(idx));
      seen[static_cast<std::size_t>(idx)] = true;
      Vec v;
      v.reserve(entry["embedding"].size());
      for (const auto& x : entry["embedding"]) {
        if (!x.is_number())
          throw IoError("malformed embeddings response: non-numeric component");
        const double value = x.get<double>();
        if (!std::isfinite(value))
          throw IoError("malformed embeddings response: non-finite component");
        v.push_back(value);
      }
      if (v.empty()) throw IoError("malformed embeddings response: empty embedding");
      out[begin + static_cast<std::size_t>(idx)] = std::move(v);
    }
  }

  ProviderConfig config_;
  std::string base_url_;
  std::string path_;
};

/// The order-aligned batch operation over any provider.
inline std::vector<Vec> embed_texts(EmbeddingProvider& provider,
                                    const std::vector<std::string>& texts) {
  return provider.embed(texts);
}

struct TextRecord {
  std::string id;
  std::string text;
};

/// Reads {"id": ..., "text": ...} lines; ids must be unique and non-empty.
inline std::vector<TextRecord> read_text_records(const std::string& path) {
  std::vector<TextRecord> records;
  std::unordered_set<std::string> seen;
  detail::for_each_line(path, [&](const ordered_json& j, std::size_t line_no) {
    TextRecord rec;
    rec.id = detail::require_string(j, "id", path, line_no);
    rec.text = detail::require_string(j, "text", path, line_no);
    if (rec.id.empty())
      throw ParseError(detail::loc(path, line_no) + ": empty id");
    if (rec.text.empty())
      throw ParseError(detail::loc(path, line_no) + ": empty text");
    if (!seen.insert(rec.id).second)
      throw ParseError(detail::loc(path, line_no) + ": duplicate id '" + rec.id + "'");
    records.push_back(std::move(rec));
  });
  return records;
}

/// Embeds a texts file into a corpus file. Resumable: ids already present in
/// a partial output are skipped, and completed chunks are flushed as they
/// finish, so an interrupted run loses at most the chunk in flight.
/// Returns the number of records embedded by this invocation.
inline std::size_t embed_corpus_file(EmbeddingProvider& provider,
                                     const std::string& texts_path,
                                     const std::string& out_path) {
  const auto input = read_text_records(texts_path);

  std::unordered_set<std::string> done;
  std::size_t existing_dim = 0;
  if (std::filesystem::exists(out_path)) {
    const Corpus existing = read_embedding_corpus(out_path);
    existing_dim = existing.dimension;
    for (const auto& rec : existing.records) done.insert(rec.id);
  }

  std::vector<const TextRecord*> pending;
  for (const auto& rec : input)
    if (!done.contains(rec.id)) pending.push_back(&rec);
  if (pending.empty()) return 0;

  std::ofstream out(out_path, std::ios::app);
  if (!out) throw IoError("cannot write " + out_path);

  const std::size_t chunk = std::max<std::size_t>(1, provider.preferred_chunk());
  std::size_t embedded = 0;
  for (std::size_t start = 0; start < pending.size(); start += chunk) {
    const std::size_t stop = std::min(start + chunk, pending.size());
    std::vector<std::string> texts;
    texts.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i) texts.push_back(pending[i]->text);
    const auto vectors = provider.embed(texts);
    for (std::size_t i = start; i < stop; ++i) {
      const Vec& v = vectors[i - start];
      if (existing_dim == 0) existing_dim = v.size();
      if (v.size() != existing_dim)
        throw ParseError(out_path + ": embedding dimension " + std::to_string(v.size()) +
                         " does not match existing corpus dimension " +
                         std::to_string(existing_dim));
      ordered_json j;
      j["id"] = pending[i]->id;
      j["text"] = pending[i]->text;
      j["vector"] = v;
      out << j.dump() << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed: " + out_path);
    embedded += stop - start;
  }
  return embedded;
}

}  // namespace pairforge
