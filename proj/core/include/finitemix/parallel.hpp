#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace finitemix {

// Thread cap for batch drivers. FINITEMIX_THREADS overrides hardware
// concurrency; values below 1 are clamped to 1.
inline unsigned sweep_thread_cap() {
    unsigned cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("FINITEMIX_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        cap = v < 1 ? 1u : static_cast<unsigned>(v);
    }
    return cap;
}

// Runs fn(i) for i in [0, count). Each index must be independent; output
// written per index keeps results deterministic under any thread count.
inline void parallel_for_indices(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned cap = sweep_thread_cap();
    const unsigned workers =
        static_cast<unsigned>(count < cap ? (count == 0 ? 1 : count) : cap);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace finitemix
