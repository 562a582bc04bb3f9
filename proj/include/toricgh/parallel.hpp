#pragma once

#include <cstddef>
#include <functional>

namespace toricgh {

/// Worker count used by parallel loops; 0 selects std::thread::hardware_concurrency().
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on contiguous chunks. Each index is visited exactly once,
/// so writing results by index keeps the output independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace toricgh
