#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace mshjb {

/// Static block-partitioned parallel loop over [0, n). Each index is visited
/// exactly once; callers must write only to per-index slots so results do
/// not depend on the thread count.
inline void parallel_for(long n, int threads,
                         const std::function<void(long)>& body) {
  if (threads <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  int nt = threads;
  if (static_cast<long>(nt) > n) nt = static_cast<int>(n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  long chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    long begin = t * chunk;
    long end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (long i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mshjb
