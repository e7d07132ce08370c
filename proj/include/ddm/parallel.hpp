#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ddm {

inline int default_worker_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Splits [0,n) into `workers` contiguous chunks and runs fn(begin,end,chunk)
/// on one thread per chunk. Chunk boundaries depend only on (n, workers), so
/// callers that merge per-chunk results in ascending chunk order stay
/// deterministic.
inline void parallel_ranges(std::int64_t n, int workers,
                            const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
    if (n <= 0) return;
    if (workers < 1) workers = 1;
    const auto chunks = static_cast<std::int64_t>(workers) < n ? workers : static_cast<int>(n);
    if (chunks == 1) {
        fn(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    for (int c = 0; c < chunks; ++c) {
        const std::int64_t begin = n * c / chunks;
        const std::int64_t end = n * (c + 1) / chunks;
        pool.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
    }
    for (auto& t : pool) t.join();
}

} // namespace ddm
