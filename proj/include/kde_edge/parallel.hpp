#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace kde_edge {

/// Splits [0, row_count) into contiguous chunks and runs `fn(begin, end)`
/// on each, one worker per chunk. threads <= 0 picks hardware concurrency.
/// Chunking is static, so results never depend on scheduling.
template <typename Fn>
void parallel_for_rows(int row_count, int threads, Fn&& fn) {
    if (row_count <= 0) return;
    int n = threads;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    n = std::clamp(n, 1, row_count);
    if (n == 1) {
        fn(0, row_count);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n);
    const int chunk = (row_count + n - 1) / n;
    for (int t = 0; t < n; ++t) {
        const int begin = t * chunk;
        const int end = std::min(begin + chunk, row_count);
        if (begin >= end) break;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace kde_edge
