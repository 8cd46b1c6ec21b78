#include "vantage/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace vantage {

void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  size_t w = std::min<size_t>(static_cast<size_t>(workers), n);
  std::vector<std::thread> threads;
  threads.reserve(w);
  // Striped assignment keeps unevenly priced items balanced across workers.
  for (size_t t = 0; t < w; ++t) {
    threads.emplace_back([&fn, t, w, n] {
      for (size_t i = t; i < n; i += w) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

int default_worker_count() {
  if (const char* env = std::getenv("VANTAGE_WORKERS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace vantage
