#pragma once

#include "fnmr/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fnmr {

/// Calls body(i) for i in [0, count) on up to `workers` threads. Tasks are
/// claimed from a shared counter, so bodies must write only to slot i.
/// The first exception thrown by any task is rethrown after all threads join.
template <typename Body>
void parallel_for(Index count, int workers, Body&& body) {
  const int threads = static_cast<int>(std::min<Index>(std::max(workers, 1), std::max<Index>(count, 1)));
  if (threads <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (Index i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fnmr
