#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace shiftscope::detail {

/// Calls task(i) for i in [0, count) on up to `workers` threads (0: hardware
/// concurrency). `task` must not throw.
template <typename Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                task(i);
            }
        });
    }
}

} // namespace shiftscope::detail
