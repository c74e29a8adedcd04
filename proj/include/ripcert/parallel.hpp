#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace ripcert {

inline int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(chunk_index) for every chunk_index in [0, n_chunks) on up to
/// `threads` workers. Chunks are claimed dynamically, so callers must write
/// results into per-chunk slots and reduce over them in chunk order; done
/// that way, the outcome is independent of scheduling and of `threads`.
template <class Fn>
void run_chunks(std::uint64_t n_chunks, int threads, Fn&& fn) {
  if (n_chunks == 0) return;
  std::uint64_t workers = threads < 1 ? 1 : static_cast<std::uint64_t>(threads);
  if (workers > n_chunks) workers = n_chunks;
  if (workers == 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_chunks, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Bounds of chunk c when [0, total) is split into n_chunks contiguous runs.
inline std::pair<std::uint64_t, std::uint64_t> chunk_bounds(std::uint64_t total,
                                                            std::uint64_t c,
                                                            std::uint64_t n_chunks) {
  std::uint64_t base = total / n_chunks, rem = total % n_chunks;
  std::uint64_t lo = c * base + (c < rem ? c : rem);
  std::uint64_t hi = lo + base + (c < rem ? 1 : 0);
  return {lo, hi};
}

}  // namespace ripcert
