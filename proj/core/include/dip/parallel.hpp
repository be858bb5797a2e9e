#pragma once

#include <cstddef>
#include <functional>

namespace dip {

// DIP_THREADS environment variable, else hardware_concurrency, at least 1.
std::size_t default_thread_count();

// Runs fn(0..n-1) across worker threads. Tasks must write to disjoint slots;
// results are deterministic because every task is itself deterministic and
// assembly happens on the caller's thread afterwards.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t n_threads = 0);

}  // namespace dip
