#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pairforge {

using Vec = std::vector<double>;

/// Input content that failed validation (malformed record, bad value,
/// inconsistent dimension). Message carries file and line where known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem or network failure (missing file, write error, HTTP failure).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Summation order is fixed (index 0 upward) so the KD-tree, the brute-force
// scan and the mining recheck all agree bit-for-bit on every distance.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

/// How two embeddings are scored against each other. Cosine treats the score
/// as a similarity (1 = identical direction); euclidean treats it as a
/// distance (0 = identical point).
enum class ScoreMode { cosine, euclidean };

inline const char* to_string(ScoreMode mode) {
  return mode == ScoreMode::cosine ? "cosine" : "euclidean";
}

inline ScoreMode parse_score_mode(std::string_view name) {
  if (name == "cosine") return ScoreMode::cosine;
  if (name == "euclidean") return ScoreMode::euclidean;
  throw std::invalid_argument("unknown score mode: " + std::string(name) +
                              " (expected 'cosine' or 'euclidean')");
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t hash = 0xcbf29ce484222325ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t hash = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), hash);
}

inline std::uint64_t fnv1a64(double value, std::uint64_t hash) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  return fnv1a64(&bits, sizeof bits, hash);
}

inline std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace pairforge
