#pragma once

#include <cstddef>
#include <functional>

namespace netsmooth {

// Worker cap: NETSMOOTH_THREADS when set (minimum 1), otherwise the hardware
// concurrency.
std::size_t worker_count();

// Runs fn(0..n_tasks-1) across at most `workers` threads (0 = worker_count()).
// Tasks must write only to their own slots; results are then deterministic
// regardless of the number of workers.
void parallel_for_tasks(std::size_t n_tasks, const std::function<void(std::size_t)>& fn,
                        std::size_t workers = 0);

} // namespace netsmooth
