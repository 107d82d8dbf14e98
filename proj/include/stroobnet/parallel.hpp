#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace stroobnet {

/// Number of worker threads; 0 means "use the hardware concurrency".
struct Workers {
  unsigned count = 0;

  unsigned resolve(std::size_t items) const {
    unsigned n = count != 0 ? count : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(items, 1)));
  }
};

/// Calls body(i) for every i in [0, n), splitting the range into contiguous
/// chunks. Each index is visited exactly once, so results written to per-index
/// slots do not depend on the worker count.
template <typename Body>
void parallel_for(std::size_t n, Workers workers, Body&& body) {
  const unsigned threads = workers.resolve(n);
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, t, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace stroobnet
