#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pspin {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Work is claimed
/// through a shared counter, so callers must write results by index. The
/// first exception thrown by any task is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace pspin
