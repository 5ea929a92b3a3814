#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace aggmin {

// Worker count: AGGMIN_THREADS caps it, hardware concurrency is the default.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("AGGMIN_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return std::min<unsigned>(hw * 4, static_cast<unsigned>(v));
    }
    return hw;
}

// Static block partition of [begin, end). Each index is processed exactly once,
// in increasing order within a block, so per-index results do not depend on the
// number of workers.
inline void parallel_for(std::size_t begin, std::size_t end,
                         const std::function<void(std::size_t)>& body) {
    const std::size_t n = (end > begin) ? end - begin : 0;
    unsigned nw = worker_count();
    if (n == 0) return;
    if (nw <= 1 || n < 2 * nw) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    const std::size_t chunk = (n + nw - 1) / nw;
    for (unsigned t = 0; t < nw; ++t) {
        std::size_t lo = begin + t * chunk;
        std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace aggmin
