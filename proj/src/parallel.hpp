#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace codasep::detail {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Tasks are
// claimed from a shared counter; fn must only write state owned by task i.
// The first exception thrown by any task is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(std::min(threads, count));
    for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace codasep::detail
