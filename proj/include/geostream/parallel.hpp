#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace geostream {

// Worker cap from GEOSTREAM_THREADS (default 1). Tasks write to disjoint
// slots, so results never depend on the thread count.
inline int worker_threads() {
    if (const char* env = std::getenv("GEOSTREAM_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int threads = std::min(worker_threads(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace geostream
