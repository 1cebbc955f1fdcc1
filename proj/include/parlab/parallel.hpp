#pragma once

#include <cstddef>
#include <functional>

namespace parlab {

// Worker count: min(hardware threads, PARLAB_THREADS). Always >= 1.
std::size_t worker_count();

// Runs fn(begin, end) over a partition of [0, n) on up to worker_count()
// threads. Results must not depend on the partition: callers either write
// disjoint ranges or combine with exact (max/min) reductions.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace parlab
