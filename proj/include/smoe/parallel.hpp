#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace smoe {

// Worker-thread cap shared by all parallel loops (CLI --threads).
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n). Work is only ever partitioned by index, and
// callers reduce per-index results in index order, so outputs do not depend
// on the thread count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(n, max_threads());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace smoe
