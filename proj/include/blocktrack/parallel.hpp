#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace blocktrack {

/// Worker count for stage-internal parallel loops. Every parallel loop in the
/// library writes into pre-sized, index-addressed slots, so results never
/// depend on this value.
struct Parallelism {
    unsigned threads = 1;
};

/// Runs fn(i) for i in [0, n) over contiguous static blocks.
template <class Fn>
void parallel_for(std::size_t n, Parallelism par, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(std::max(1u, par.threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) {
                        fn(i);
                    }
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            });
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

} // namespace blocktrack
