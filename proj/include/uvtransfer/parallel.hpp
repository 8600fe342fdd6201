#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace uvt {

/// 0 means "one worker per hardware thread".
inline unsigned resolve_threads(unsigned requested) {
    if (requested) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, count) into contiguous bands and runs fn(begin, end) on each
/// band, one band per worker. Bands never overlap, so callers that write
/// only inside their band need no synchronisation.
template <class Fn>
void parallel_bands(int count, unsigned threads, Fn&& fn) {
    if (count <= 0) return;
    const int workers = static_cast<int>(std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(count)));
    if (workers == 1) {
        fn(0, count);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const int begin = static_cast<int>(static_cast<long long>(count) * w / workers);
        const int end = static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
        pool.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace uvt
