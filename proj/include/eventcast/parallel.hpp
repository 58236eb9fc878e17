#pragma once

#include <cstddef>
#include <functional>

namespace eventcast {

// Worker count: EVENTCAST_THREADS if set, otherwise the configured default
// (1 unless set_default_workers was called).
std::size_t worker_count();
void set_default_workers(std::size_t workers);

// Runs task(i) for i in [0, n) on up to `workers` threads. Tasks must write
// only to their own output slot; callers reduce the slots in index order, so
// results never depend on scheduling. The first exception thrown by a task is
// rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace eventcast
