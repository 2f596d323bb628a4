// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_SRC_KDTREE_HPP
#define OCC_SRC_KDTREE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "occ/core.hpp"

namespace occ::detail {

inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

// Balanced, implicit kd-tree over a borrowed point array. Queries are
// exact: pruning only discards subtrees whose split-plane distance is
// strictly larger than the current bound, so ties are always visited.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points)
      : points_(points), order_(points.size()), axis_(points.size(), 0) {
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    build(0, order_.size());
  }

  // Squared distances to the k nearest points other than `self`, ascending.
  std::vector<double> knn(std::size_t self, std::size_t k) const {
    std::priority_queue<double> heap;
    knn_rec(0, order_.size(), points_[self], self, k, heap);
    std::vector<double> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
      out[i] = heap.top();
      heap.pop();
    }
    return out;
  }

  // Number of points other than `self` with squared distance <= r2, stopping
  // once `limit` is reached.
  std::size_t count_within(std::size_t self, double r2, std::size_t limit) const {
    std::size_t count = 0;
    count_rec(0, order_.size(), points_[self], self, r2, limit, count);
    return count;
  }

 private:
  void build(std::size_t lo, std::size_t hi) {
    if (hi - lo <= 1) return;
    Vec3 mn = points_[order_[lo]];
    Vec3 mx = mn;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      mn = mn.cwiseMin(points_[order_[i]]);
      mx = mx.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (mx - mn).maxCoeff(&axis);
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    axis_[mid] = static_cast<std::uint8_t>(axis);
    build(lo, mid);
    build(mid + 1, hi);
  }

  void knn_rec(std::size_t lo, std::size_t hi, const Vec3& q, std::size_t self,
               std::size_t k, std::priority_queue<double>& heap) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::uint32_t idx = order_[mid];
    if (idx != self) {
      const double d2 = squared_distance(points_[idx], q);
      if (heap.size() < k) {
        heap.push(d2);
      } else if (d2 < heap.top()) {
        heap.pop();
        heap.push(d2);
      }
    }
    if (hi - lo == 1) return;
    const int axis = axis_[mid];
    const double diff = q[axis] - points_[idx][axis];
    const bool left_first = diff < 0.0;
    if (left_first) {
      knn_rec(lo, mid, q, self, k, heap);
    } else {
      knn_rec(mid + 1, hi, q, self, k, heap);
    }
    if (heap.size() < k || diff * diff <= heap.top()) {
      if (left_first) {
        knn_rec(mid + 1, hi, q, self, k, heap);
      } else {
        knn_rec(lo, mid, q, self, k, heap);
      }
    }
  }

  void count_rec(std::size_t lo, std::size_t hi, const Vec3& q, std::size_t self,
                 double r2, std::size_t limit, std::size_t& count) const {
    if (lo >= hi || count >= limit) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::uint32_t idx = order_[mid];
    if (idx != self && squared_distance(points_[idx], q) <= r2) ++count;
    if (hi - lo == 1) return;
    const int axis = axis_[mid];
    const double diff = q[axis] - points_[idx][axis];
    if (diff <= 0.0 || diff * diff <= r2) count_rec(lo, mid, q, self, r2, limit, count);
    if (diff >= 0.0 || diff * diff <= r2) {
      count_rec(mid + 1, hi, q, self, r2, limit, count);
    }
  }

  std::span<const Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint8_t> axis_;
};

}  // namespace occ::detail

#endif  // OCC_SRC_KDTREE_HPP
