#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace bq::detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs body(i) for i in [0, n) on contiguous blocks. Each index is handled by
// exactly one thread, so per-index outputs are independent of the thread count.
template <typename Body>
void parallel_for(std::int64_t n, int threads, Body&& body) {
  const int t = std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(n, 1));
  if (t <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  std::vector<std::jthread> pool;
  const std::int64_t block = (n + t - 1) / t;
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::int64_t end = std::min(n, (w + 1) * block);
        for (std::int64_t i = w * block; i < end; ++i) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bq::detail
