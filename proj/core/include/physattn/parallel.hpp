#pragma once

#include <cstddef>
#include <functional>

namespace physattn {

/// Worker cap: PHYSATTN_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
[[nodiscard]] std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Indices are
/// claimed from a shared counter, so callers must write results into
/// per-index slots. The first exception thrown by any body is rethrown after
/// all workers join.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace physattn
