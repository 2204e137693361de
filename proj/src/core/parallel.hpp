#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace zeroday {

inline std::size_t default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<std::size_t>(n);
}

// Runs fn(block_index, lo, hi) over fixed-size blocks of [0, n). Block
// boundaries depend only on n and block_size, never on the thread count,
// so per-block partial results combined in block order give identical
// output for any number of threads.
template <typename Fn>
void parallel_blocks(std::size_t n, std::size_t block_size, std::size_t threads,
                     Fn&& fn) {
  if (n == 0) return;
  if (block_size == 0) block_size = 1;
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  auto run = [&](std::size_t b) {
    const std::size_t lo = b * block_size;
    const std::size_t hi = std::min(n, lo + block_size);
    fn(b, lo, hi);
  };
  if (threads <= 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) break;
      run(b);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t use = std::min(threads, n_blocks);
  pool.reserve(use);
  for (std::size_t t = 0; t < use; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

inline std::size_t block_count(std::size_t n, std::size_t block_size) {
  return n == 0 ? 0 : (n + block_size - 1) / block_size;
}

}  // namespace zeroday
