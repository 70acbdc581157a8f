// parallel.hpp -- chunked data-parallel helper with thread-count-independent results.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace more {

/// Fixed work-chunk size. Chunk boundaries depend only on the problem size,
/// never on the thread count, so per-chunk results (and any reduction that
/// combines them in chunk order) are bit-identical for any --threads value.
inline constexpr Eigen::Index kParallelChunk = 256;

inline Eigen::Index chunk_count(Eigen::Index n) {
    return (n + kParallelChunk - 1) / kParallelChunk;
}

/// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
/// threads <= 1 runs serially in chunk order.
inline void parallel_chunks(Eigen::Index n, int threads,
                            const std::function<void(Eigen::Index, Eigen::Index, Eigen::Index)>& fn) {
    const Eigen::Index chunks = chunk_count(n);
    if (chunks == 0) return;

    auto run = [&](Eigen::Index c) {
        const Eigen::Index begin = c * kParallelChunk;
        const Eigen::Index end = std::min(begin + kParallelChunk, n);
        fn(c, begin, end);
    };

    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
    if (nthreads == 1) {
        for (Eigen::Index c = 0; c < chunks; ++c) run(c);
        return;
    }

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (Eigen::Index c = t; c < chunks; c += nthreads) run(c);
        });
    }
    for (auto& th : pool) th.join();
}

/// Runs fn(i) for each i in [0, n), one unit per index. Use when n is small
/// and each unit is heavy (e.g. one expert's update); units must be
/// independent, which keeps results thread-count invariant.
inline void parallel_indices(Eigen::Index n, int threads,
                             const std::function<void(Eigen::Index)>& fn) {
    if (n <= 0) return;
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (nthreads == 1) {
        for (Eigen::Index i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (Eigen::Index i = t; i < n; i += nthreads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace more
