#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace chimera_sat {

/// Worker threads available to a single command: hardware concurrency,
/// capped by the CHIMERA_SAT_THREADS environment variable when set.
size_t worker_count();

/// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on each,
/// possibly concurrently. Chunk boundaries depend only on n and the worker
/// count, and results must be written to disjoint slots so that merging is
/// deterministic. The first exception thrown by any chunk is rethrown.
template <class Body>
void parallel_chunks(size_t n, Body&& body, size_t min_chunk = 1) {
    const size_t workers = std::max<size_t>(1, std::min(worker_count(), n / std::max<size_t>(1, min_chunk)));
    if (workers <= 1 || n <= 1) {
        body(size_t{0}, n);
        return;
    }
    const size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (size_t w = 0; w < workers; ++w) {
        const size_t begin = w * chunk;
        const size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace chimera_sat
