#pragma once

#include <cstddef>
#include <functional>

namespace loudsn {

// Worker count from LOUDSN_WORKERS, else std::thread::hardware_concurrency() (at least 1).
std::size_t default_worker_count();

// Runs body(i) for i in [0, n) on `workers` threads. Each index is processed
// exactly once; callers write results into slot i, so output order never
// depends on scheduling. The first exception escaping a body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

}  // namespace loudsn
