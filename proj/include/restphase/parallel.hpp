#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace restphase::detail {

/// Run fn(i) for i in [0, n) on up to `threads` workers. Work items must be
/// independent; callers keep results order-stable by writing to index i.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace restphase::detail
