#pragma once

#include <cstddef>
#include <functional>

namespace cpred {

/// Number of worker threads used for internal parallelism. Reads the
/// CPRED_THREADS environment variable on every call; falls back to the
/// hardware concurrency. Always at least 1.
int thread_budget();

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
/// thread, so results written to disjoint slots are identical for any thread
/// count. Exceptions are rethrown on the calling thread, lowest index first.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cpred
