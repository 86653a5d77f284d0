#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace barriermc {

inline constexpr std::uint64_t kChunkSize = 8192;

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(chunk_index, begin, end) over [0, n) in fixed-size chunks. The
// chunk layout is independent of the worker count, so per-chunk results can
// be reduced in index order for bit-identical output under any --threads.
inline void parallel_chunks(std::uint64_t n, int threads,
                            const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn) {
    const std::size_t n_chunks = static_cast<std::size_t>((n + kChunkSize - 1) / kChunkSize);
    threads = resolve_threads(threads);
    if (threads <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            const std::uint64_t b = static_cast<std::uint64_t>(c) * kChunkSize;
            fn(c, b, std::min(n, b + kChunkSize));
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::uint64_t b = static_cast<std::uint64_t>(c) * kChunkSize;
            try {
                fn(c, b, std::min(n, b + kChunkSize));
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace barriermc
