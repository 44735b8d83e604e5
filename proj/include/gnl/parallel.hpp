#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gnl {

/// Runs fn(i) for i in [0, n) on `threads` workers over static contiguous
/// chunks. Callers must write results into per-index slots and reduce in
/// index order afterwards; that keeps every aggregate bit-identical for any
/// thread count. threads <= 1 runs inline.
inline void parallel_for(long n, int threads,
                         const std::function<void(long)>& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<long>(threads, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const long lo = n * w / workers;
    const long hi = n * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Default worker count when a caller passes threads == 0.
inline int default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace gnl
