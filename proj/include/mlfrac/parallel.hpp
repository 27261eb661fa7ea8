#pragma once

#include <cstddef>
#include <functional>

namespace mlfrac {

/// Number of worker threads used by parallel_for. 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, count). Work is split into contiguous blocks;
/// each index is visited exactly once and results must be written to
/// index-owned storage, so output never depends on the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace mlfrac
