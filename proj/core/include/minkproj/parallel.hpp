#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace minkproj {

/// Thread count used when a caller asks for "all cores" (0).
inline std::size_t resolve_threads(std::size_t requested)
{
    if (requested != 0) {
        return requested;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
///
/// Work is split into contiguous chunks, one per worker. Each index is
/// processed by exactly one call, so results that are written per index are
/// independent of the thread count.
template<typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
    threads = std::min(resolve_threads(threads), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    const std::size_t chunk = (count + threads - 1) / threads;
    std::vector<std::exception_ptr> errors(threads);
    auto run = [&fn, &errors, chunk, count](std::size_t t) {
        try {
            const std::size_t end = std::min(count, (t + 1) * chunk);
            for (std::size_t i = t * chunk; i < end; ++i) {
                fn(i);
            }
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads - 1);
        for (std::size_t t = 1; t < threads; ++t) {
            workers.emplace_back(run, t);
        }
        run(0);
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// Runs fn(begin, end) over contiguous row blocks.
template<typename Fn>
void parallel_blocks(std::size_t count, std::size_t threads, Fn&& fn)
{
    threads = std::min(resolve_threads(threads), std::max<std::size_t>(1, count / 2048));
    if (threads <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + threads - 1) / threads;
    parallel_for(threads, threads, [&](std::size_t t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin < end) {
            fn(begin, end);
        }
    });
}

} // namespace minkproj
