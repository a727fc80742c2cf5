#pragma once

#include <cstddef>
#include <functional>

namespace topofuse {

/// Worker count from TOPOFUSE_WORKERS, falling back to hardware concurrency.
std::size_t default_worker_count();

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// visited exactly once; callers write results into slot i so output order
/// never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace topofuse
