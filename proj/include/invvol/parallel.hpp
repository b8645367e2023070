#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace invvol {

// Worker count: hardware concurrency, capped by the INVVOL_THREADS
// environment variable when set.  Read fresh on every call so tests can
// change the cap at runtime.
inline unsigned worker_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("INVVOL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && v < static_cast<long>(hw))
            hw = static_cast<unsigned>(v);
    }
    return hw;
}

// Run body(begin, end) over a static contiguous partition of [0, count).
// Results must be written to disjoint slots so the partition (and therefore
// the thread count) can never change the output bits.  The first exception
// thrown by any worker is rethrown after all join.
template <class Body>
inline void parallel_chunks(std::size_t count, const Body& body) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(worker_threads(), count);
    if (workers <= 1) {
        body(std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr err;
    std::mutex err_mu;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(count, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            try {
                body(b, e);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace invvol
