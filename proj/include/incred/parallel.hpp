#pragma once

#include <cstddef>
#include <functional>

namespace incred {

/// Worker count: INCRED_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Calls body(i) for every i in [0, count), spread over worker_count()
/// threads in contiguous chunks. Each index is visited exactly once. The
/// first exception thrown by any call is rethrown after all workers stop.
/// Callers store results by index and fold them in order afterwards, so
/// output never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace incred
