#pragma once

#include <cstddef>
#include <functional>

namespace pcglasso {

/// Worker count used when a caller passes 0: hardware concurrency, at least 1.
unsigned default_threads();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Work is handed out by an atomic counter, so results must be written to
/// per-index slots for the outcome to be independent of scheduling. The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace pcglasso
