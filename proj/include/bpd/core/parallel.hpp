#pragma once

// Deterministic data-parallel helpers.
//
// Work over an index range [0, n) is split into fixed-size chunks whose
// boundaries depend only on n (never on the worker count). Each chunk is
// reduced on its own and the chunk partials are combined in chunk order, so a
// reduction returns bit-identical results for any thread count.

#include <bpd/core/summation.hpp>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bpd::parallel {

inline constexpr std::size_t kChunk = 4096;

namespace detail {
inline std::atomic<unsigned>& threads_setting() {
    static std::atomic<unsigned> value{[] {
        if (const char* env = std::getenv("BPD_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }()};
    return value;
}
}  // namespace detail

inline unsigned thread_count() { return detail::threads_setting().load(); }

/// Sets the worker count used by all subsequent parallel loops (0 = hardware default).
inline void set_thread_count(unsigned n) {
    detail::threads_setting().store(n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n);
}

inline std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

/// Calls body(chunk_index, begin, end) once per chunk, spread over the workers.
template <class Body>
void for_each_chunk(std::size_t n, Body&& body) {
    const std::size_t chunks = chunk_count(n);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Calls body(i) for every i in [0, n); body must only write to slot i.
template <class Body>
void for_each_index(std::size_t n, Body&& body) {
    for_each_chunk(n, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) body(i);
    });
}

/// Compensated sum of term(i) over [0, n) in fixed order.
template <class T, class Term>
T sum(std::size_t n, Term&& term) {
    const std::size_t chunks = chunk_count(n);
    std::vector<T> partial(chunks, T{});
    for_each_chunk(n, [&](std::size_t c, std::size_t b, std::size_t e) {
        CompensatedSum<T> acc;
        for (std::size_t i = b; i < e; ++i) acc.add(term(i));
        partial[c] = acc.value();
    });
    CompensatedSum<T> total;
    for (const T& p : partial) total.add(p);
    return total.value();
}

}  // namespace bpd::parallel
