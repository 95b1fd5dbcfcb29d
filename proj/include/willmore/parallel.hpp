#ifndef WILLMORE_PARALLEL_HPP
#define WILLMORE_PARALLEL_HPP

#include <cstddef>
#include <algorithm>
#include <cstdlib>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace willmore {

/// Worker cap: WILLMORE_THREADS when set to a positive integer, else hardware parallelism.
inline unsigned worker_count() {
  if (const char* env = std::getenv("WILLMORE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

namespace detail {
// Set inside worker threads so nested loops run serially instead of oversubscribing.
inline thread_local bool in_worker = false;
}  // namespace detail

/// Runs body(i) for i in [0, n) on contiguous chunks. Each index is visited once, so results
/// written to per-index slots do not depend on the thread count. The first exception by chunk
/// order is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = detail::in_worker ? 1 : std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi, w] {
      detail::in_worker = true;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Pairwise summation in a fixed order.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace willmore

#endif  // WILLMORE_PARALLEL_HPP
