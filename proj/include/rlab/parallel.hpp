#pragma once

#include <cstddef>
#include <functional>

namespace rlab {

// Worker count from RESTRICTION_LAB_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Every index is
// visited exactly once; callers must write results to per-index slots so the
// outcome does not depend on the partition.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace rlab
