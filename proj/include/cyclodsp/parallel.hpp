#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cyclodsp {

namespace detail {
inline bool& in_parallel_region() {
    thread_local bool flag = false;
    return flag;
}
} // namespace detail

/// Runs fn(0..n-1) on a small worker pool. Iterations must write to disjoint
/// state; ordering is unspecified but every result slot is owned by exactly
/// one index, so output is deterministic. Nested calls degrade to serial
/// execution, which keeps trial-level and row-level parallelism composable.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = hw == 0 ? 1 : static_cast<std::size_t>(hw);
    if (n <= 1 || workers <= 1 || detail::in_parallel_region()) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex err_mutex;
    auto worker = [&]() {
        detail::in_parallel_region() = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                break;
            }
        }
        detail::in_parallel_region() = false;
    };
    std::vector<std::thread> pool;
    const std::size_t t = workers < n ? workers : n;
    pool.reserve(t - 1);
    for (std::size_t i = 1; i < t; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace cyclodsp
