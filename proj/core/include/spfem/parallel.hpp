#pragma once

#include <cstddef>
#include <functional>

namespace spfem {

/// Process-wide worker count used by the parallel loops below (default 1).
unsigned worker_count();
void set_worker_count(unsigned workers);

/// Runs body(i) for i in [0, n) on worker_count() threads with a static
/// contiguous partition. Callers write results into slot i only, so the
/// output never depends on the number of workers. A parallel_for issued
/// from inside a worker runs sequentially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spfem
