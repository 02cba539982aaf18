#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace veronese::detail {

// Runs fn(worker_id) on `workers` threads (inline when workers <= 1) and
// rethrows the first exception raised by any of them.
template <class Fn>
void run_workers(unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1) {
    fn(0u);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          fn(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Splits [0, count) into contiguous ranges, one per worker.
template <class Fn>
void parallel_ranges(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  run_workers(workers, [&](unsigned w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    if (begin < end) fn(begin, end);
  });
}

}  // namespace veronese::detail
