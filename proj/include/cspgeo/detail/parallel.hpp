#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cspgeo::detail {

inline unsigned resolve_threads(unsigned threads, std::uint64_t tasks) {
  if (threads == 0) {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  return static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, tasks)));
}

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Results must be written to per-index slots. An exception stops further
/// scheduling; after all workers join, the exception of the smallest failing index is
/// rethrown. Indices are claimed in order, so that index is the same for any thread count.
template <class Body>
void parallel_for(std::uint64_t count, unsigned threads, Body&& body) {
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::uint64_t error_index = count;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error = std::current_exception();
          error_index = i;
        }
        next.store(count);
      }
    }
  };
  threads = resolve_threads(threads, count);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace cspgeo::detail
