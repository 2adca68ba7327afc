#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace osclab {

/// Worker count used by the parallel loops; 0 selects the hardware count.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Number of chunks parallel_chunks uses for n items.
inline std::size_t chunk_count(std::size_t n) {
  std::size_t workers = thread_count();
  if (workers > n) workers = n == 0 ? 1 : n;
  return workers == 0 ? 1 : workers;
}

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// fn(begin, end, chunk). Chunk boundaries depend only on n and the
/// thread count, so per-chunk results merged in chunk order are
/// deterministic.
template <class Fn>
std::size_t parallel_chunks(std::size_t n, Fn&& fn) {
  const std::size_t workers = chunk_count(n);
  if (workers <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return 1;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t c = 0; c < workers; ++c) {
    std::size_t begin = n * c / workers;
    std::size_t end = n * (c + 1) / workers;
    pool.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
  }
  return workers;
}

}  // namespace osclab
