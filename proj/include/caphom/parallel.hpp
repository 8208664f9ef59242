#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace caphom {

inline std::atomic<int> &thread_count_ref() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_num_threads(int n) { thread_count_ref() = n < 1 ? 1 : n; }
inline int num_threads() { return thread_count_ref(); }

/// Runs f(begin, end) over a partition of [0, n). The partition depends only
/// on n and the worker count, and workers never share output indices, so the
/// result is identical for any thread count as long as f writes disjointly.
template <class F>
void parallel_for(std::size_t n, F &&f) {
    int nt = num_threads();
    if (nt <= 1 || n < 2048) {
        f(std::size_t(0), n);
        return;
    }
    std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> workers;
    workers.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = std::min(n, t * chunk);
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&f, lo, hi] { f(lo, hi); });
    }
    for (auto &w : workers) w.join();
}

/// Dot product summed in fixed blocks of 4096 so the result does not depend
/// on the thread count (block partials are accumulated in block order).
inline double det_dot(const double *a, const double *b, std::size_t n) {
    constexpr std::size_t B = 4096;
    std::size_t nblocks = (n + B - 1) / B;
    std::vector<double> partial(nblocks, 0.0);
    parallel_for(nblocks, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t blk = lo; blk < hi; ++blk) {
            std::size_t i0 = blk * B, i1 = std::min(n, i0 + B);
            double s = 0.0;
            for (std::size_t i = i0; i < i1; ++i) s += a[i] * b[i];
            partial[blk] = s;
        }
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

} // namespace caphom
