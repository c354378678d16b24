#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace orrw {

// Worker count: hardware concurrency, capped by the ORRW_THREADS variable.
inline unsigned worker_count(std::uint64_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("ORRW_THREADS")) {
        unsigned cap = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        if (cap >= 1) n = std::min(n, cap);
    }
    if (jobs < n) n = static_cast<unsigned>(jobs);
    return std::max(1u, n);
}

// Runs fn(replica_index) for indices 0..n-1 on a worker pool. Each replica
// must derive all randomness from its own index so the outcome does not
// depend on the worker count or the scheduling order.
template <typename Fn>
inline void parallel_replicas(std::uint64_t n, Fn&& fn) {
    if (n == 0) return;
    unsigned workers = worker_count(n);
    if (workers == 1) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mutex;
    auto body = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                failed = true;
                if (error.empty()) error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed) throw std::runtime_error("replica failed: " + error);
}

} // namespace orrw
