#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace spinqec {

inline std::atomic<int> g_max_threads{1};

/// Worker threads used by Monte Carlo loops (default 1). Results never
/// depend on this: loop bodies write to their own index slot and reductions
/// run serially in index order.
inline void set_max_threads(int n) {
  g_max_threads.store(n < 1 ? 1 : n);
}

inline int max_threads() { return g_max_threads.load(); }

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int threads = std::min<std::size_t>(max_threads(), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (int t = 1; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::size_t i = 0; i < std::min(chunk, n); ++i) fn(i);
  for (auto& th : pool) th.join();
}

}  // namespace spinqec
