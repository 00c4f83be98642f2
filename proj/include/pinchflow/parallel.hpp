#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pinchflow {

/// Worker count: PINCHFLOW_THREADS when set (floored at 1), else the hardware
/// concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("PINCHFLOW_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
        return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

/// Static block partition of [0, n) across workers.  fn(begin, end) must be
/// safe to run concurrently on disjoint ranges.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                         int max_workers = 0) {
    int workers = worker_count();
    if (max_workers > 0 && max_workers < workers) workers = max_workers;
    if (workers <= 1 || n < 2) {
        fn(0, n);
        return;
    }
    if ((std::size_t)workers > n) workers = (int)n;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t b = (std::size_t)w * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

} // namespace pinchflow
