#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace kdim {

// 0 selects std::thread::hardware_concurrency().
inline unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

struct IndexRange {
  std::int64_t lo;  // inclusive
  std::int64_t hi;  // inclusive
};

// Splits [lo, hi] into contiguous chunks, evaluates fn(range) for each on up
// to `workers` threads, and returns the per-chunk results in range order.
// The chunking depends only on the range, so merged output is identical for
// any worker count.
template <class Result, class Fn>
std::vector<Result> map_chunks(std::int64_t lo, std::int64_t hi, unsigned workers, Fn fn,
                               std::int64_t min_chunk = 1 << 16) {
  std::vector<IndexRange> chunks;
  if (lo <= hi) {
    const std::int64_t span = hi - lo + 1;
    const std::int64_t count = std::clamp<std::int64_t>(span / min_chunk, 1, 256);
    const std::int64_t step = span / count;
    std::int64_t start = lo;
    for (std::int64_t i = 0; i < count; ++i) {
      const std::int64_t end = (i + 1 == count) ? hi : start + step - 1;
      chunks.push_back({start, end});
      start = end + 1;
    }
  }
  std::vector<Result> results(chunks.size());
  const unsigned threads =
      std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(chunks.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i) results[i] = fn(chunks[i]);
    return results;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < chunks.size(); i += threads) results[i] = fn(chunks[i]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace kdim
