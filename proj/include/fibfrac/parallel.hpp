#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fibfrac {

/// Worker count: FIBFRAC_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("FIBFRAC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end, chunk_index) over contiguous chunks of [0, n).
/// Chunk boundaries depend only on n and the worker count.
template <class Body>
void parallel_chunks(std::size_t n, Body&& body, unsigned workers = worker_count()) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, n / 4096)));
  if (workers <= 1) {
    body(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t b = std::min(n, w * step), e = std::min(n, b + step);
    pool.emplace_back([&body, b, e, w] { body(b, e, w); });
  }
  for (auto& t : pool) t.join();
}

/// Max-reduction of f(k) over [0, n); the result does not depend on chunking.
template <class F>
double parallel_max(std::size_t n, F&& f, double init) {
  const unsigned workers = worker_count();
  std::vector<double> partial(workers, init);
  parallel_chunks(
      n,
      [&](std::size_t b, std::size_t e, unsigned w) {
        double m = init;
        for (std::size_t k = b; k < e; ++k) m = std::max(m, f(k));
        partial[w] = m;
      },
      workers);
  return *std::max_element(partial.begin(), partial.end());
}

}  // namespace fibfrac
