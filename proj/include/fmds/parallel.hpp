#pragma once

#include <cstddef>
#include <functional>

namespace fmds {

// Worker cap from FMDS_THREADS (default: hardware concurrency), read once.
std::size_t max_threads();

// Runs fn(i) for i in [0, n). Each index must be an independent unit of
// work writing to its own slot; with that contract the result does not
// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fmds
