#pragma once

#include <cstddef>
#include <functional>

namespace vantage {

// Runs fn(i) for i in [0, n) on `workers` threads with a static block
// partition. Callers write results into preallocated per-index slots, so the
// output is identical for any worker count. workers <= 1 runs inline.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

// Default worker count: VANTAGE_WORKERS env var if set, else hardware
// concurrency.
int default_worker_count();

}  // namespace vantage
