#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

// Deterministic data parallelism.
//
// parallel_for splits [0, n) into index-order chunks handled by a small
// thread team.  Each index writes only its own output slot, so the result is
// identical for any thread count; OMITLAB_THREADS caps the team size
// (OMITLAB_THREADS=1 forces serial execution).

namespace omitlab {

inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("OMITLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = std::min<unsigned long>(hw, static_cast<unsigned long>(v));
    }
    return hw;
}

// Runs body(i) for i in [0, n).  body must only touch state owned by index i.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned team = std::min<std::size_t>(thread_budget(), n == 0 ? 1 : n);
    if (team <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(team);
    for (unsigned w = 0; w < team; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& t : workers) t.join();
}

} // namespace omitlab
