#pragma once

#include <cstddef>
#include <functional>

namespace sglc {

/// Number of workers parallel_for will use: the programmatic cap if set,
/// else the SGLC_THREADS environment variable, else hardware concurrency.
int worker_count();

/// Override the worker count (0 restores env/hardware resolution).
/// Worker count must never change numerical results; it only changes how
/// independent patch/tile jobs are scheduled.
void set_worker_cap(int cap);

/// Runs body(i) for i in [0, count). Jobs must be independent (disjoint
/// writes); scheduling order is unspecified. If any job throws, the
/// exception thrown by the lowest index is rethrown after all workers
/// finish, so error reporting is deterministic too.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace sglc
