#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace harmonidiff {

// Runs fn(i) for i in [0, n) across up to `threads` workers (0 = hardware
// count). Each index runs exactly once; the first exception is rethrown on
// the calling thread after all workers join.
inline void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0) {
    if (n <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (workers > n) workers = n;
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load() && first_error) std::rethrow_exception(first_error);
}

}  // namespace harmonidiff
