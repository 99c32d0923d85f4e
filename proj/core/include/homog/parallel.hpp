#pragma once

#include <cstddef>
#include <functional>

namespace homog {

/// Number of worker threads used when a caller passes threads <= 0:
/// HOMOG_THREADS if set, otherwise hardware concurrency.
int default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace homog
