#pragma once

#include <cstddef>
#include <functional>

namespace taccompress {

// Logical CPU count, at least 1.
std::size_t default_jobs();

// Calls fn(i) for every i in [0, n) on up to `jobs` threads (0 picks
// default_jobs()). Indices are handed out in order; the first exception
// thrown by any call is rethrown after all threads have stopped.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace taccompress
