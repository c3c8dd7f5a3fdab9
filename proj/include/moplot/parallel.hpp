#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace moplot {

/// Number of worker threads used when a caller passes 0.
inline unsigned default_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into contiguous chunks, one per thread, and calls body(thread_id, begin, end).
/// The first exception thrown by any chunk is rethrown on the calling thread.
template <class Body>
void parallel_chunks(std::size_t n, unsigned threads, Body&& body) {
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        body(0u, std::size_t{0}, n);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(n, t * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        workers.emplace_back([&, t, begin, end] {
            try {
                body(t, begin, end);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    workers.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace moplot
