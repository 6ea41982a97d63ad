#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace changeauc {

// Worker count: explicit request > CHANGEAUC_THREADS > hardware concurrency.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CHANGEAUC_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(i) for i in [0, total). Results must be written to per-index slots so
// the outcome is identical regardless of the worker count. The first exception
// (lowest worker id) is rethrown on the calling thread.
template <typename Fn>
void parallel_for(long total, int threads, Fn&& fn) {
    threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, total)));
    if (threads <= 1) {
        for (long i = 0; i < total; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            long lo = total * w / threads;
            long hi = total * (w + 1) / threads;
            try {
                for (long i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace changeauc
