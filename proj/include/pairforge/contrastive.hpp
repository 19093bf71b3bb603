#pragma once

// Margin-based contrastive loss over pair scores, its analytic gradients,
// and a small linear projection head trained by full-batch gradient descent:
//
//   loss(y, d) = (1 - d)^2           if y = 1   (positive pair)
//                max(d - alpha, 0)^2 if y = 0   (negative pair)
//
// The positive branch is minimized at d = 1, so the default score is cosine
// similarity; a euclidean mode is kept so d can also be read as a distance.
// The subgradient at the hinge kink d = alpha is 0, making the zero-loss
// region an exact fixed point of training.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "pairforge/core.hpp"
#include "pairforge/records.hpp"
#include "pairforge/rng.hpp"

namespace pairforge {

struct ContrastiveParams {
  double alpha = 0.5;  // margin: negatives stop incurring loss at d <= alpha
  ScoreMode mode = ScoreMode::cosine;
  double learning_rate = 0.05;
  std::size_t epochs = 200;
};

inline void validate_params(const ContrastiveParams& params) {
  if (params.mode == ScoreMode::cosine) {
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0))
      throw std::invalid_argument("alpha must be in [0, 1] for cosine mode");
  } else if (!(params.alpha >= 0.0)) {
    throw std::invalid_argument("alpha must be non-negative");
  }
  if (!(params.learning_rate >= 0.0))
    throw std::invalid_argument("learning_rate must be non-negative");
}

/// Pair score d: cosine similarity in [-1, 1] or Euclidean distance >= 0.
inline double score(std::span<const double> a, std::span<const double> b, ScoreMode mode) {
  if (a.size() != b.size())
    throw std::invalid_argument("score: dimension mismatch");
  if (mode == ScoreMode::euclidean) return euclidean_distance(a, b);
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("score: zero vector in cosine mode");
  return dot(a, b) / (na * nb);
}

inline double contrastive_loss(int y, double d, double alpha) {
  if (y == 1) {
    const double gap = 1.0 - d;
    return gap * gap;
  }
  const double excess = std::max(d - alpha, 0.0);
  return excess * excess;
}

/// d(loss)/d(d). Subgradient 0 at the kink d = alpha.
inline double loss_gradient(int y, double d, double alpha) {
  if (y == 1) return -2.0 * (1.0 - d);
  return 2.0 * std::max(d - alpha, 0.0);
}

struct PairScore {
  int y = 0;
  double d = 0.0;
  double loss = 0.0;
};

struct VectorPair {
  Vec a;
  Vec b;
  int y = 0;  // 1 positive, 0 negative
};

inline std::vector<PairScore> score_pairs(std::span<const VectorPair> pairs,
                                          const ContrastiveParams& params) {
  validate_params(params);
  std::vector<PairScore> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const double d = score(p.a, p.b, params.mode);
    out.push_back({p.y, d, contrastive_loss(p.y, d, params.alpha)});
  }
  return out;
}

namespace detail {

struct ScoreGrad {
  double d = 0.0;
  Vec dd_da;
  Vec dd_db;
};

// Score plus its gradient w.r.t. both inputs. Not validating here: a zero
// vector or zero distance yields NaN/zero subgradient and is surfaced by the
// caller's divergence check rather than by throwing mid-batch.
inline ScoreGrad score_with_grad(std::span<const double> a, std::span<const double> b,
                                 ScoreMode mode) {
  const std::size_t n = a.size();
  ScoreGrad g;
  g.dd_da.assign(n, 0.0);
  g.dd_db.assign(n, 0.0);
  if (mode == ScoreMode::euclidean) {
    g.d = euclidean_distance(a, b);
    if (g.d > 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = (a[i] - b[i]) / g.d;
        g.dd_da[i] = diff;
        g.dd_db[i] = -diff;
      }
    }
    return g;
  }
  const double na = norm(a), nb = norm(b);
  g.d = dot(a, b) / (na * nb);
  for (std::size_t i = 0; i < n; ++i) {
    g.dd_da[i] = b[i] / (na * nb) - g.d * a[i] / (na * na);
    g.dd_db[i] = a[i] / (na * nb) - g.d * b[i] / (nb * nb);
  }
  return g;
}

}  // namespace detail

struct BatchResult {
  double mean_loss = 0.0;
  std::vector<Vec> grad_a;  // d(mean loss)/d(pairs[i].a)
  std::vector<Vec> grad_b;
};

/// Mean loss over a batch and its gradient with respect to every input
/// vector. Pairs are reduced in input order, so the result is bit-stable.
inline BatchResult batch_loss(std::span<const VectorPair> pairs,
                              const ContrastiveParams& params) {
  validate_params(params);
  if (pairs.empty())
    throw std::invalid_argument("batch_loss: empty batch");
  const std::size_t dim = pairs[0].a.size();
  BatchResult result;
  result.grad_a.reserve(pairs.size());
  result.grad_b.reserve(pairs.size());
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  for (const auto& p : pairs) {
    if (p.a.size() != dim || p.b.size() != dim)
      throw std::invalid_argument("batch_loss: inconsistent dimensions");
    auto sg = detail::score_with_grad(p.a, p.b, params.mode);
    result.mean_loss += contrastive_loss(p.y, sg.d, params.alpha) * inv_n;
    const double dl = loss_gradient(p.y, sg.d, params.alpha) * inv_n;
    for (auto& v : sg.dd_da) v *= dl;
    for (auto& v : sg.dd_db) v *= dl;
    result.grad_a.push_back(std::move(sg.dd_da));
    result.grad_b.push_back(std::move(sg.dd_db));
  }
  return result;
}

/// Linear map standing in, at desk scale, for the model being fine-tuned.
/// Weights are row-major input_dim x output_dim; project(x) = W^T x.
struct ProjectionHead {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<double> weights;

  static ProjectionHead init(std::size_t input_dim, std::size_t output_dim,
                             std::uint64_t seed) {
    if (input_dim == 0 || output_dim == 0)
      throw std::invalid_argument("ProjectionHead: zero dimension");
    ProjectionHead head;
    head.input_dim = input_dim;
    head.output_dim = output_dim;
    head.weights.resize(input_dim * output_dim);
    const double scale = std::sqrt(6.0 / static_cast<double>(input_dim + output_dim));
    Rng rng(seed, 0x4ead);
    for (auto& w : head.weights) w = (2.0 * rng.next_unit() - 1.0) * scale;
    return head;
  }

  static ProjectionHead identity(std::size_t dim) {
    ProjectionHead head;
    head.input_dim = dim;
    head.output_dim = dim;
    head.weights.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) head.weights[i * dim + i] = 1.0;
    return head;
  }

  Vec project(std::span<const double> x) const {
    if (x.size() != input_dim)
      throw std::invalid_argument("ProjectionHead::project: dimension mismatch");
    Vec z(output_dim, 0.0);
    for (std::size_t i = 0; i < input_dim; ++i) {
      const double xi = x[i];
      const double* row = weights.data() + i * output_dim;
      for (std::size_t j = 0; j < output_dim; ++j) z[j] += xi * row[j];
    }
    return z;
  }
};

inline void save_head(const std::string& path, const ProjectionHead& head) {
  nlohmann::ordered_json j;
  j["input_dim"] = head.input_dim;
  j["output_dim"] = head.output_dim;
  j["weights"] = head.weights;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline ProjectionHead load_head(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": malformed head file: " + e.what());
  }
  ProjectionHead head;
  head.input_dim = j.at("input_dim").get<std::size_t>();
  head.output_dim = j.at("output_dim").get<std::size_t>();
  head.weights = j.at("weights").get<std::vector<double>>();
  if (head.weights.size() != head.input_dim * head.output_dim)
    throw ParseError(path + ": weight count does not match dimensions");
  return head;
}

struct TrainResult {
  ProjectionHead head;
  // Mean batch loss before each update, plus one final entry after the last
  // update; back() is the trained model's loss.
  std::vector<double> loss_trace;
};

/// Full-batch gradient descent on the mean contrastive loss over projected
/// vectors. In cosine mode projections are L2-normalized, keeping d within
/// [-1, 1] and the loss bounded. Deterministic for fixed (pairs, params,
/// head); throws on divergence (non-finite loss).
inline TrainResult train_head(std::span<const VectorPair> pairs,
                              const ContrastiveParams& params, ProjectionHead head) {
  validate_params(params);
  if (pairs.empty()) throw std::invalid_argument("train_head: no pairs");
  bool has_pos = false, has_neg = false;
  for (const auto& p : pairs) {
    if (p.a.size() != head.input_dim || p.b.size() != head.input_dim)
      throw std::invalid_argument("train_head: pair dimension does not match head input");
    (p.y == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg)
    throw std::invalid_argument("train_head: need at least one positive and one negative pair");

  const std::size_t in = head.input_dim, out = head.output_dim;
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  const bool normalize = params.mode == ScoreMode::cosine;

  TrainResult result;
  result.head = std::move(head);
  std::vector<double> grad_w(in * out);

  auto accumulate_input_grad = [&](std::span<const double> x, std::span<const double> gz) {
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = x[i];
      double* row = grad_w.data() + i * out;
      for (std::size_t j = 0; j < out; ++j) row[j] += xi * gz[j];
    }
  };

  for (std::size_t epoch = 0; epoch <= params.epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double mean_loss = 0.0;
    for (const auto& p : pairs) {
      Vec za = result.head.project(p.a);
      Vec zb = result.head.project(p.b);
      double na = 1.0, nb = 1.0;
      if (normalize) {
        na = norm(za);
        nb = norm(zb);
        for (auto& v : za) v /= na;
        for (auto& v : zb) v /= nb;
      }
      const auto sg = detail::score_with_grad(za, zb, params.mode);
      mean_loss += contrastive_loss(p.y, sg.d, params.alpha) * inv_n;
      if (epoch == params.epochs) continue;  // final evaluation only
      const double dl = loss_gradient(p.y, sg.d, params.alpha) * inv_n;
      // score_with_grad saw the unit vectors, so its gradient already lies in
      // the tangent plane; mapping back to the raw projection only needs the
      // 1/|z| factor of the normalization Jacobian.
      Vec ga(out), gb(out);
      for (std::size_t j = 0; j < out; ++j) {
        ga[j] = dl * sg.dd_da[j] / na;
        gb[j] = dl * sg.dd_db[j] / nb;
      }
      accumulate_input_grad(p.a, ga);
      accumulate_input_grad(p.b, gb);
    }
    if (!std::isfinite(mean_loss))
      throw std::runtime_error("train_head: diverged (non-finite loss) at epoch " +
                               std::to_string(epoch));
    result.loss_trace.push_back(mean_loss);
    if (epoch == params.epochs) break;
    for (std::size_t w = 0; w < grad_w.size(); ++w)
      result.head.weights[w] -= params.learning_rate * grad_w[w];
  }
  return result;
}

inline TrainResult train_head(std::span<const VectorPair> pairs,
                              const ContrastiveParams& params, std::uint64_t seed,
                              std::size_t output_dim = 0) {
  if (pairs.empty()) throw std::invalid_argument("train_head: no pairs");
  const std::size_t in = pairs[0].a.size();
  return train_head(pairs, params, ProjectionHead::init(in, output_dim ? output_dim : in, seed));
}

/// Resolves text-level training pairs against a corpus, producing the
/// (anchor, other, label) vector triples the loss consumes. When duplicate
/// texts carry distinct ids the first record wins.
inline std::vector<VectorPair> pairs_to_vector_pairs(std::span<const TrainingPair> pairs,
                                                     const Corpus& corpus) {
  std::unordered_map<std::string_view, const Vec*> by_text;
  for (const auto& rec : corpus.records) by_text.try_emplace(rec.text, &rec.vector);
  auto lookup = [&](const std::string& text) -> const Vec& {
    const auto it = by_text.find(text);
    if (it == by_text.end())
      throw ParseError("pair text not found in corpus: " +
                       (text.size() > 80 ? text.substr(0, 80) + "..." : text));
    return *it->second;
  };
  std::vector<VectorPair> out;
  for (const auto& pair : pairs) {
    const Vec& query = lookup(pair.query);
    for (const auto& pos : pair.positive_pairs) out.push_back({query, lookup(pos), 1});
    for (const auto& neg : pair.negative_pairs) out.push_back({query, lookup(neg), 0});
  }
  return out;
}

}  // namespace pairforge
