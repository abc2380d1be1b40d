#pragma once

#include <cstddef>
#include <functional>

namespace scantrack {

/// Runs fn(i) for i in [0, n) across worker threads. Each index must write
/// only to its own output slot; under that contract results are identical to
/// the sequential run. threads <= 1 (or small n) runs inline.
void parallel_for(size_t n, const std::function<void(size_t)>& fn, int threads = 0);

/// Hardware thread count, at least 1.
int hardware_threads();

}  // namespace scantrack
