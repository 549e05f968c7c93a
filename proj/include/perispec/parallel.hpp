#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "perispec/types.hpp"

namespace perispec {

// Runs fn(i) for i in [0, count) on a bounded pool. Tasks must write
// only to their own slot; results are aggregated by index, so output
// order does not depend on scheduling. Task exceptions are collected
// and rethrown as one SolverError after the pool drains.
template <class Fn>
void parallel_for_indexed(int count, int workers, Fn&& fn) {
    if (count <= 0) return;
    int w = std::min(std::max(workers, 1), count);
    std::vector<std::string> errors(count);
    std::vector<uint8_t> failed(count, 0);

    auto guarded = [&](int i) {
        try {
            fn(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            failed[i] = 1;
        }
    };

    if (w == 1) {
        for (int i = 0; i < count; ++i) guarded(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(w);
        for (int t = 0; t < w; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    int i = next.fetch_add(1, std::memory_order_relaxed);
                    if (i >= count) break;
                    guarded(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    std::string msg;
    for (int i = 0; i < count; ++i) {
        if (failed[i]) msg += (msg.empty() ? "" : "; ") + errors[i];
    }
    if (!msg.empty()) throw SolverError(msg);
}

}  // namespace perispec
