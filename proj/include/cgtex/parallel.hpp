#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cgtex {

/// Worker count: hardware concurrency, capped by the CGTEX_THREADS
/// environment variable when set.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("CGTEX_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

/// Runs body(lo, hi) over a partition of [0, count). Callers must write to
/// disjoint slots and reduce sequentially afterwards so results do not depend
/// on the partition.
inline void parallel_for(long count, const std::function<void(long, long)>& body) {
    const int workers = std::min<long>(worker_count(), std::max<long>(count, 1));
    if (workers <= 1 || count < 64) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const long chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long lo = w * chunk;
        const long hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace cgtex
