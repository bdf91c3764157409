#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cavsq
{

/// Resolves a requested worker count; 0 means one per hardware thread.
inline unsigned resolve_workers(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/*!
 * Calls fn(i) for i in [0, n) across worker threads, each taking a contiguous
 * slice. Callers write results into slot i so the outcome is independent of
 * the worker count.
 */
template<class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn)
{
    workers = std::min<unsigned>(resolve_workers(workers),
                                 static_cast<unsigned>(std::max<std::size_t>(n, 1)));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t const chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w)
    {
        std::size_t const begin = w * chunk;
        std::size_t const end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&, begin, end] {
            try
            {
                for (std::size_t i = begin; i < end; ++i)
                    fn(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace cavsq
