#pragma once

#include <cstddef>
#include <functional>

namespace momentdiv {

/// Worker count: hardware concurrency, capped by DIV_SOLVER_THREADS when set.
unsigned worker_count();

/// Calls body(i) for i in [0, n) across worker_count() threads. Work is handed
/// out by an atomic counter, so callers must write results by index. The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace momentdiv
