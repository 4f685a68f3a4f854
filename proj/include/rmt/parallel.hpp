#pragma once

#include <cstddef>
#include <functional>

namespace rmt {

// Upper bound on worker threads used by grid and replica loops. 0 means hardware concurrency.
void set_thread_limit(unsigned limit);
unsigned thread_limit();

// Runs body(i) for i in [0, count). Each index is visited exactly once; order is unspecified.
// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rmt
