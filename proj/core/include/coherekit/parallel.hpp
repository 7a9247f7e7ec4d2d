#pragma once

#include <cstddef>
#include <functional>

namespace coherekit {

/// Worker count: COHEREKIT_THREADS if set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n). Items are independent; callers write
/// results into pre-sized slots, so output never depends on the schedule.
/// Calls made from inside a worker run serially. The first exception thrown
/// by any item is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace coherekit
