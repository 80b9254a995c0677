#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pucci3d {

/// Upper bound on worker threads; 0 means hardware concurrency.
void set_thread_limit(std::size_t n);
std::size_t thread_limit();

/// Calls fn(chunk_index, begin, end) for each fixed-size chunk of [0, n).
/// Chunk boundaries do not depend on the thread count, so callers that
/// reduce per-chunk results in chunk order get identical output for any
/// number of workers.
template <class Fn>
void for_each_chunk(std::size_t n, std::size_t chunk, Fn&& fn) {
    if (n == 0) return;
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t chunks = (n + chunk - 1) / chunk;
    const std::size_t workers = std::min(thread_limit(), chunks);

    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) fn(c, c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks; c = next++) {
                try {
                    fn(c, c * chunk, std::min(n, (c + 1) * chunk));
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace pucci3d
