#pragma once

#include <cstddef>
#include <functional>

namespace roekit {

/// Number of worker threads to use when a caller passes 0.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// executed exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. Exceptions are rethrown (first by index).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace roekit
