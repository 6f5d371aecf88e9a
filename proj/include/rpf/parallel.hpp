#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rpf/common.hpp"

namespace rpf {

/// Worker count: RPF_NUM_THREADS if set and positive, else hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("RPF_NUM_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {
/// Set on pool workers; nested parallel_for calls then run inline.
inline thread_local bool in_worker = false;
}  // namespace detail

/// Runs body(i) for i in [0, count). Work items are claimed dynamically; callers
/// must write results into per-index slots so the outcome is order independent.
template <typename Body>
void parallel_for(Index count, Body&& body, unsigned threads = default_thread_count()) {
  threads = static_cast<unsigned>(std::min<Index>(threads, count));
  if (threads <= 1 || detail::in_worker) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    detail::in_worker = true;
    for (Index i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rpf
