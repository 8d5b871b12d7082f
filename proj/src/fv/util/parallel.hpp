#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace fv::util {

// Runs fn(0..count-1) across up to `threads` workers. Tasks must be
// independent and write only to their own slots; then results do not depend
// on scheduling and a threads<=1 run is bit-identical to a parallel one.
inline void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  const size_t n_workers = std::min(static_cast<size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace fv::util
