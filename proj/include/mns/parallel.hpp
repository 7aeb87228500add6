#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace mns {

namespace detail {

inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{std::max(1u, std::thread::hardware_concurrency())};
    return cap;
}

inline thread_local bool in_parallel_region = false;

template <class F>
void run_workers(unsigned nt, F&& body) {
    std::vector<std::thread> workers;
    workers.reserve(nt);
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < nt; ++t) {
        workers.emplace_back([&, t] {
            in_parallel_region = true;
            try {
                body(t);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// Caps the number of worker threads used by parallel loops (0 and 1 both
/// mean sequential).
inline void set_max_threads(unsigned t) { detail::thread_cap().store(t == 0 ? 1 : t); }

inline unsigned max_threads() { return std::max(1u, detail::thread_cap().load()); }

/// Runs fn(i) for i in [0, count), splitting the range into contiguous chunks.
/// fn must write only to locations keyed by i, so results are independent of
/// the thread count. Nested calls run sequentially.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
    if (count == 0) return;
    unsigned nt = max_threads();
    if (detail::in_parallel_region || nt <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, count));
    const std::size_t chunk = (count + nt - 1) / nt;
    detail::run_workers(nt, [&](unsigned t) {
        const std::size_t b = static_cast<std::size_t>(t) * chunk;
        const std::size_t e = std::min(count, b + chunk);
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

/// Like parallel_for but assigns indices round-robin; use for triangular
/// workloads where late indices are much cheaper than early ones.
template <class F>
void parallel_for_strided(std::size_t count, F&& fn) {
    if (count == 0) return;
    unsigned nt = max_threads();
    if (detail::in_parallel_region || nt <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, count));
    detail::run_workers(nt, [&](unsigned t) {
        for (std::size_t i = t; i < count; i += nt) fn(i);
    });
}

}  // namespace mns
