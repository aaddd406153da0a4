#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ergoscope {

// Calls fn(begin, end) on fixed contiguous chunks of [0, n). Chunk boundaries depend only on
// n and threads, so per-index results never depend on scheduling.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t t = std::min<std::size_t>(threads, n);
    const std::size_t chunk = (n + t - 1) / t;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    for (std::size_t c = 0; c < t; ++c) {
        const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, c, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline unsigned default_threads() {
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : h;
}

}  // namespace ergoscope
