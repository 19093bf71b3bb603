#pragma once

// Exact k-nearest-neighbour search over a fixed-dimension point set.
//
// The index is a balanced KD-tree: median split, axis cycling with depth.
// Construction and queries are deterministic; ties between equidistant
// neighbours are broken by ascending ordinal, so results are stable enough
// for golden-file tests. Distances are computed and compared in 64-bit
// floats throughout.
//
// brute_force_knn is the same contract implemented as a full scan with a
// stable sort. It doubles as the verification oracle for the tree and as
// the predictable fallback at high dimension (roughly dim >= 32), where
// KD-tree pruning degrades toward a linear scan anyway.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "pairforge/core.hpp"

namespace pairforge {

/// One search result: the corpus position of the neighbour and its exact
/// Euclidean distance from the query.
struct Neighbor {
  std::size_t ordinal;
  double distance;

  bool operator==(const Neighbor&) const = default;
};

class KnnIndex {
 public:
  /// Builds the tree over a non-empty uniform-dimension point set. The index
  /// stores its own copy of the points; it is immutable afterwards and safe
  /// to query from any number of threads.
  static KnnIndex build(std::span<const Vec> points) {
    if (points.empty())
      throw std::invalid_argument("KnnIndex::build: empty corpus");
    const std::size_t dim = points[0].size();
    if (dim == 0)
      throw std::invalid_argument("KnnIndex::build: dimension 0");
    KnnIndex index;
    index.dim_ = dim;
    index.count_ = points.size();
    index.coords_.reserve(points.size() * dim);
    for (const auto& p : points) {
      if (p.size() != dim)
        throw std::invalid_argument("KnnIndex::build: non-uniform dimensions");
      index.coords_.insert(index.coords_.end(), p.begin(), p.end());
    }
    index.order_.resize(points.size());
    for (std::uint32_t i = 0; i < points.size(); ++i) index.order_[i] = i;
    index.nodes_.reserve(2 * points.size() / kLeafSize + 2);
    index.root_ = index.build_node(0, static_cast<std::uint32_t>(points.size()), 0);
    return index;
  }

  std::size_t size() const { return count_; }
  std::size_t dimension() const { return dim_; }

  std::span<const double> point(std::size_t ordinal) const {
    return {coords_.data() + ordinal * dim_, dim_};
  }

  /// The k nearest neighbours of `query`, ascending by (distance, ordinal).
  std::vector<Neighbor> query_knn(std::span<const double> query, std::size_t k) const {
    if (query.size() != dim_)
      throw std::invalid_argument("query_knn: query dimension " +
                                  std::to_string(query.size()) + " != index dimension " +
                                  std::to_string(dim_));
    if (k == 0 || k > count_)
      throw std::invalid_argument("query_knn: k=" + std::to_string(k) +
                                  " out of range [1, " + std::to_string(count_) + "]");
    Search search{query, k};
    visit(root_, search);
    std::vector<Candidate> cands;
    cands.reserve(search.heap.size());
    while (!search.heap.empty()) {
      cands.push_back(search.heap.top());
      search.heap.pop();
    }
    std::sort(cands.begin(), cands.end(), candidate_less);
    std::vector<Neighbor> out;
    out.reserve(cands.size());
    for (const auto& c : cands)
      out.push_back({c.ordinal, std::sqrt(c.dist2)});
    return out;
  }

  /// Every corpus point, ascending by (distance, ordinal). This is the
  /// mining loop's query shape (k = corpus size).
  std::vector<Neighbor> query_all(std::span<const double> query) const {
    return query_knn(query, count_);
  }

 private:
  struct Candidate {
    double dist2;
    std::uint32_t ordinal;
  };

  static bool candidate_less(const Candidate& a, const Candidate& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    return a.ordinal < b.ordinal;
  }

  struct Node {
    double split;
    std::uint32_t axis;
    std::int32_t left;   // -1 on leaves
    std::int32_t right;  // -1 on leaves
    std::uint32_t begin;
    std::uint32_t end;
  };

  struct Search {
    std::span<const double> query;
    std::size_t k;
    // Max-heap ordered by (dist2, ordinal); top() is the current worst.
    std::priority_queue<Candidate, std::vector<Candidate>,
                        bool (*)(const Candidate&, const Candidate&)>
        heap{candidate_less};
  };

  static constexpr std::uint32_t kLeafSize = 16;

  double coord(std::uint32_t ordinal, std::uint32_t axis) const {
    return coords_[static_cast<std::size_t>(ordinal) * dim_ + axis];
  }

  std::int32_t build_node(std::uint32_t begin, std::uint32_t end, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    if (end - begin <= kLeafSize) {
      nodes_[static_cast<std::size_t>(id)] = {0.0, 0, -1, -1, begin, end};
      return id;
    }
    const auto axis = static_cast<std::uint32_t>(depth % dim_);
    const std::uint32_t mid = begin + (end - begin) / 2;
    // Total order (coordinate, ordinal) makes the median element, and hence
    // the tree, independent of the nth_element implementation.
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = coord(a, axis), cb = coord(b, axis);
                       if (ca != cb) return ca < cb;
                       return a < b;
                     });
    const double split = coord(order_[mid], axis);
    const std::int32_t left = build_node(begin, mid, depth + 1);
    const std::int32_t right = build_node(mid, end, depth + 1);
    nodes_[static_cast<std::size_t>(id)] = {split, axis, left, right, begin, end};
    return id;
  }

  void visit(std::int32_t node_id, Search& s) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t ord = order_[i];
        const Candidate c{squared_distance(s.query, point(ord)), ord};
        if (s.heap.size() < s.k) {
          s.heap.push(c);
        } else if (candidate_less(c, s.heap.top())) {
          s.heap.pop();
          s.heap.push(c);
        }
      }
      return;
    }
    const double delta = s.query[node.axis] - node.split;
    const std::int32_t near = delta < 0.0 ? node.left : node.right;
    const std::int32_t far = delta < 0.0 ? node.right : node.left;
    visit(near, s);
    // The far half-space can still hold distance ties (<=), which matter for
    // the ordinal tie-break, so prune only on strict inequality.
    if (s.heap.size() < s.k || delta * delta <= s.heap.top().dist2) visit(far, s);
  }

  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

/// Full scan + stable sort. Same contract and tie-break as KnnIndex queries.
inline std::vector<Neighbor> brute_force_knn(std::span<const Vec> points,
                                             std::span<const double> query,
                                             std::size_t k) {
  if (points.empty())
    throw std::invalid_argument("brute_force_knn: empty corpus");
  if (query.size() != points[0].size())
    throw std::invalid_argument("brute_force_knn: query dimension mismatch");
  if (k == 0 || k > points.size())
    throw std::invalid_argument("brute_force_knn: k=" + std::to_string(k) +
                                " out of range [1, " + std::to_string(points.size()) + "]");
  // Compare squared distances, exactly as the tree does; sorting on the
  // rounded square roots could order true ties differently.
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    all.emplace_back(squared_distance(points[i], query), i);
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Neighbor> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.push_back({all[i].second, std::sqrt(all[i].first)});
  return out;
}

inline std::vector<Neighbor> brute_force_all(std::span<const Vec> points,
                                             std::span<const double> query) {
  return brute_force_knn(points, query, points.size());
}

}  // namespace pairforge
