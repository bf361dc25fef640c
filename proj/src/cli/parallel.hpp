#pragma once

#include <cstddef>
#include <functional>

namespace cvloss::cli {

/// CVLOSS_THREADS if set to a positive integer, else the hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
/// write results into per-index slots, so output order never depends on threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cvloss::cli
