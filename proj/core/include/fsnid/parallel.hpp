#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace fsnid {

// Runs independent tasks on up to `jobs` threads. Each task owns its output
// slot and its own seeded random stream, so results do not depend on
// scheduling order.
inline void run_tasks(std::vector<std::function<void()>>& tasks, size_t jobs) {
    if (jobs <= 1 || tasks.size() <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            tasks[i]();
        }
    };
    const size_t n_threads = std::min(jobs, tasks.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace fsnid
