#pragma once

// Deterministic fan-out: work items are cut into fixed-size blocks, blocks are
// processed by any worker, and results are stored by block index. Callers
// reduce the blocks in index order, so the result never depends on the
// worker count or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sburgers {

inline constexpr std::size_t kBlockSize = 512;

/// Calls fn(begin, end) for each block of [0, n) and returns the per-block
/// results in block order.
template <typename Result, typename Fn>
std::vector<Result> map_blocks(std::size_t n, int workers, Fn&& fn, std::size_t block = kBlockSize) {
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<Result> out(n_blocks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        out[b] = fn(b * block, std::min(n, (b + 1) * block));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_blocks);
        return;
      }
    }
  };

  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n_blocks <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(std::min(threads, n_blocks));
    for (std::size_t t = 0; t < std::min(threads, n_blocks); ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace sburgers
