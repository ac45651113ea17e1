#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace panelbreak {

// Runs fn(i) for i = 0..count-1 on up to `workers` threads. Work items pull
// from a shared atomic counter; callers make fn(i) write only to slot i of a
// preallocated result buffer, so output is independent of scheduling. The
// first exception wins and is rethrown on the calling thread after all
// workers drain.
inline void parallel_for(int workers, long count,
                         const std::function<void(long)>& fn) {
  if (count <= 0) return;
  if (workers < 1) workers = 1;
  if (workers > count) workers = static_cast<int>(count);
  if (workers == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace panelbreak
