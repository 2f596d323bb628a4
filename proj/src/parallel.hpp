// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_SRC_PARALLEL_HPP
#define OCC_SRC_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "occ/core.hpp"

namespace occ::detail {

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries
// depend on the thread count, so callers must only write to disjoint
// per-index outputs or merge with order-independent reductions.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_chunk = 1024) {
  const std::size_t workers = std::min<std::size_t>(
      thread_count(), std::max<std::size_t>(1, n / std::max<std::size_t>(min_chunk, 1)));
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        if (begin < end) fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Pairwise summation in a fixed tree shape, independent of thread count.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace occ::detail

#endif  // OCC_SRC_PARALLEL_HPP
