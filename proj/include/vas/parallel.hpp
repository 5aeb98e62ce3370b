#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace vas {

/// Process-wide cap used when a call passes threads = 0. Starts at 1.
int default_threads();
void set_default_threads(int threads);

/// Runs f(i) for every i in [begin, end) on up to `threads` workers.
/// Work is split into contiguous blocks; each index is handled by exactly
/// one worker, so callers writing to per-index slots get schedule-free
/// results. The first exception thrown by any worker is rethrown.
template <class F>
void parallel_for(int begin, int end, F&& f, int threads = 0) {
  if (end <= begin) return;
  if (threads <= 0) threads = default_threads();
  const int count = end - begin;
  threads = std::clamp(threads, 1, count);
  if (threads == 1) {
    for (int i = begin; i < end; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int lo = begin + static_cast<int>(static_cast<long long>(count) * t / threads);
    const int hi = begin + static_cast<int>(static_cast<long long>(count) * (t + 1) / threads);
    pool.emplace_back([&, lo, hi, t] {
      try {
        for (int i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace vas
