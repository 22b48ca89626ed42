#pragma once

#include <cstddef>
#include <functional>

namespace nodegen {

/// Worker cap shared by all parallel loops; 0 selects hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(begin, end) over a static partition of [0, n). Partition
/// boundaries depend on the worker count only, so bodies that write disjoint
/// outputs give identical results for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace nodegen
