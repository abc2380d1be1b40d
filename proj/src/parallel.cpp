#include "scantrack/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace scantrack {

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn, int threads) {
  if (threads <= 0) threads = hardware_threads();
  if (threads == 1 || n < 2 * static_cast<size_t>(threads)) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  const size_t chunk = std::max<size_t>(1, n / (static_cast<size_t>(threads) * 8));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        const size_t end = std::min(n, begin + chunk);
        for (size_t i = begin; i < end; ++i) fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace scantrack
