#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace twinbeam {

// Runs fn(begin, end) over contiguous chunks of [0, total). Results written
// through pre-assigned indices stay identical for any worker count.
inline void parallel_for_chunks(long long total, int threads,
                                const std::function<void(long long, long long)>& fn) {
  if (total <= 0) return;
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  int n = std::clamp(threads <= 0 ? hw : threads, 1, 256);
  n = static_cast<int>(std::min<long long>(n, total));
  if (n <= 1) {
    fn(0, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  const long long chunk = (total + n - 1) / n;
  for (int t = 0; t < n; ++t) {
    const long long begin = t * chunk;
    const long long end = std::min(total, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(fn, begin, end);
  }
  for (auto& th : pool) th.join();
}

}  // namespace twinbeam
