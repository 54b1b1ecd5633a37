#pragma once

#include <cstddef>
#include <functional>

namespace icb {

// Runs body(i) for i in [0, count) on up to `threads` workers. Callers write
// results into per-index slots, so the outcome never depends on scheduling.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

unsigned hardware_threads();

}  // namespace icb
