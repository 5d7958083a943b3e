#pragma once

#include <cstddef>
#include <functional>

namespace idlab {

/// Worker count used by every parallel loop in the library. Defaults to the
/// hardware concurrency; 0 restores the default.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint
/// and callers write results into index-addressed storage, so output never
/// depends on the worker count.
void parallel_for_chunks(std::size_t n, std::size_t grain,
                         const std::function<void(std::size_t, std::size_t)>& fn);

template <typename F>
void parallel_for(std::size_t n, F&& fn) {
  parallel_for_chunks(n, 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace idlab
