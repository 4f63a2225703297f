#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bcft {

/// out[i] = fn(i) for i in [0, n). With `parallel` the indices are split in
/// contiguous blocks over hardware threads; each slot is written by exactly
/// one task, so results are identical to the sequential run.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, bool parallel)
{
    std::vector<T> out(n);
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = parallel ? std::min(n, hw) : 1;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace bcft
