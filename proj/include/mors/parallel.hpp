#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace mors {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work is split
// into contiguous index ranges; callers own any output slots, typically a
// pre-sized vector indexed by i, so results are identical for any thread
// count. fn must not throw.
template <typename Fn>
inline void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (count == 0) return;
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

} // namespace mors
