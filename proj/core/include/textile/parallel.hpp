#ifndef TEXTILE_PARALLEL_HPP
#define TEXTILE_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace textile {

// Splits [begin, end) into contiguous chunks, one per hardware thread, and
// calls body(chunk_begin, chunk_end) on each. The first exception is
// rethrown after all workers finish.
template <typename Body>
void parallel_chunks(std::int64_t begin, std::int64_t end, Body&& body) {
    const std::int64_t n = end - begin;
    if (n <= 0) return;
    const std::int64_t workers =
        std::min<std::int64_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers == 1) {
        body(begin, end);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t lo = begin + n * w / workers;
        const std::int64_t hi = begin + n * (w + 1) / workers;
        threads.emplace_back([&, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace textile

#endif  // TEXTILE_PARALLEL_HPP
