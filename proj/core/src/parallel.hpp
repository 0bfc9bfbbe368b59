#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace moqa::detail {

inline int resolve_workers(int requested) {
    if (requested > 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs body(chunk_index, first, last) over contiguous chunks of [0, count).
// The caller's output must be addressed by index or chunk_index so the
// result is independent of the chunk layout. Returns the number of chunks.
// The first captured exception is rethrown on the calling thread.
inline int parallel_chunks(
    std::uint64_t count, int workers,
    const std::function<void(int, std::uint64_t, std::uint64_t)>& body) {
    workers = resolve_workers(workers);
    if (workers <= 1 || count < 2048) {
        body(0, 0, count);
        return 1;
    }
    const std::uint64_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> threads;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    threads.reserve(workers);
    int chunks = 0;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t first = std::min(count, w * chunk);
        const std::uint64_t last = std::min(count, first + chunk);
        if (first >= last) {
            break;
        }
        ++chunks;
        threads.emplace_back([&, w, first, last] {
            try {
                body(w, first, last);
            } catch (...) {
                if (!failed.exchange(true)) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return chunks;
}

// Dynamic work distribution for independent tasks of uneven cost; task
// results must again be index-addressed by the caller.
inline void parallel_indexed(std::uint64_t count, int workers,
                             const std::function<void(std::uint64_t)>& task) {
    workers = resolve_workers(workers);
    if (workers <= 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= count || failed.load()) {
                    return;
                }
                try {
                    task(i);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        error = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (std::thread& t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace moqa::detail
