#pragma once

#include <cstddef>
#include <functional>

namespace gaussmet {

// Worker count: GAUSSMET_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n); indices are claimed dynamically, so callers
// must write results by index to stay deterministic. The first exception
// thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gaussmet
