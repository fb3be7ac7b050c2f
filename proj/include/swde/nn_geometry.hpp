#pragma once

#include "errors.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

namespace swde {

//! Volume pi^{d/2} / Gamma(d/2 + 1) of the unit ball in R^d.
inline double unit_ball_volume(int d)
{
  if (d < 1)
    throw ArgumentError("unit_ball_volume: dimension must be >= 1");
  const double half = 0.5 * d;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

//! k-th nearest neighbour radii R_(k);i and ball volumes V_(k);i = c0 R^d.
struct NeighborStats
{
  int k = 1;
  double unit_ball = 0.0;
  std::vector<double> radii;
  std::vector<double> volumes;
};

//! Exact k-d tree over a PointSet (Euclidean metric, static).
class KdTree
{
public:
  static constexpr std::size_t leaf_size = 12;

  explicit KdTree(const PointSet& points)
    : points_(&points)
    , order_(points.size())
  {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!order_.empty())
      build(0, order_.size());
  }

  //! k-th smallest squared distance from point i to the other points.
  //! Requires 1 <= k <= n - 1.
  double kth_squared_distance(std::size_t i, int k) const
  {
    std::priority_queue<double> heap; // max-heap of the k best so far
    query(0, i, static_cast<std::size_t>(k), heap);
    return heap.top();
  }

private:
  struct Node
  {
    std::size_t begin, end;
    int axis = -1; // -1: leaf
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  double coord(std::size_t idx, std::size_t axis) const { return (*points_)[idx][axis]; }

  std::size_t build(std::size_t begin, std::size_t end)
  {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size)
      return id;

    const std::size_t d = points_->dim();
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < d; ++a) {
      double lo = coord(order_[begin], a), hi = lo;
      for (std::size_t p = begin + 1; p < end; ++p) {
        lo = std::min(lo, coord(order_[p], a));
        hi = std::max(hi, coord(order_[p], a));
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        axis = a;
      }
    }
    if (widest <= 0.0)
      return id; // all coincident

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t lhs, std::size_t rhs) {
                       return coord(lhs, axis) < coord(rhs, axis);
                     });
    const double split = coord(order_[mid], axis);
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    Node& node = nodes_[id];
    node.axis = static_cast<int>(axis);
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  double squared_distance(std::size_t a, std::size_t b) const
  {
    const auto pa = (*points_)[a];
    const auto pb = (*points_)[b];
    double acc = 0.0;
    for (std::size_t c = 0; c < pa.size(); ++c) {
      const double diff = pa[c] - pb[c];
      acc += diff * diff;
    }
    return acc;
  }

  void query(std::size_t node_id,
             std::size_t self,
             std::size_t k,
             std::priority_queue<double>& heap) const
  {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t other = order_[p];
        if (other == self)
          continue;
        const double dist = squared_distance(self, other);
        if (heap.size() < k) {
          heap.push(dist);
        } else if (dist < heap.top()) {
          heap.pop();
          heap.push(dist);
        }
      }
      return;
    }
    // Points left of the split have coordinate <= split, right ones >= split.
    const double delta = coord(self, static_cast<std::size_t>(node.axis)) - node.split;
    const std::size_t near = delta < 0.0 ? node.left : node.right;
    const std::size_t far = delta < 0.0 ? node.right : node.left;
    query(near, self, k, heap);
    if (heap.size() < k || delta * delta <= heap.top())
      query(far, self, k, heap);
  }

  const PointSet* points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

inline void check_neighbor_query(std::size_t n, int k)
{
  if (n < 2)
    throw EstimationError("nearest-neighbour statistics need at least 2 points");
  if (k < 1)
    throw ArgumentError("k must be >= 1");
  if (static_cast<std::size_t>(k) >= n)
    throw EstimationError("k = " + std::to_string(k) + " must be smaller than n = " +
                          std::to_string(n));
}

//! For every point, the distance to its k-th nearest neighbour among the
//! other points and the volume of the corresponding ball.
inline NeighborStats knn_stats(const PointSet& points, int k)
{
  const std::size_t n = points.size();
  if (n < 2 || k < 1 || static_cast<std::size_t>(k) >= n)
    throw ArgumentError("knn_stats: need 1 <= k <= n - 1, got k = " + std::to_string(k) +
                        ", n = " + std::to_string(n));
  const int d = static_cast<int>(points.dim());

  NeighborStats stats;
  stats.k = k;
  stats.unit_ball = unit_ball_volume(d);
  stats.radii.resize(n);
  stats.volumes.resize(n);

  const KdTree tree(points);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(tree.kth_squared_distance(i, k));
    stats.radii[i] = r;
    stats.volumes[i] = stats.unit_ball * std::pow(r, d);
  }
  return stats;
}

struct KValidation
{
  bool ok = true;
  std::string message;
};

//! Soft check of the growth condition k^{3/2} Gamma(k)/Gamma(k+1/2) = o(n^{1/2}):
//! warns once the left side exceeds half of sqrt(n).
inline KValidation validate_k(std::size_t n, int k)
{
  const double kk = static_cast<double>(k);
  const double lhs = std::pow(kk, 1.5) * std::exp(std::lgamma(kk) - std::lgamma(kk + 0.5));
  const double bound = 0.5 * std::sqrt(static_cast<double>(n));
  if (lhs > bound) {
    return {false,
            "k = " + std::to_string(k) + " is large for n = " + std::to_string(n) +
              ": k^{3/2} Gamma(k)/Gamma(k+1/2) = " + std::to_string(lhs) +
              " exceeds 0.5 sqrt(n) = " + std::to_string(bound) +
              "; coefficient estimates may be inconsistent"};
  }
  return {};
}

} // namespace swde
