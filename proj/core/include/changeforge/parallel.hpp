#pragma once

#include <cstddef>
#include <functional>

namespace changeforge {

// Worker count: CHANGEFORGE_THREADS when set to a positive integer, else the
// hardware concurrency (at least 1).
unsigned worker_count();

// Runs body(i) for i in [0, count). Each index runs exactly once; the first
// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace changeforge
