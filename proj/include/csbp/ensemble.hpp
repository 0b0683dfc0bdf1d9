#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace csbp
{
//---------------------------------------------------------------------------//
/*!
 * Evaluate f(i) for i in [0, n) on up to `threads` workers.
 *
 * Results land at their own index, so the output does not depend on the
 * thread count or on scheduling. If a call throws, workers stop taking new
 * chunks and the exception with the smallest failing index is rethrown.
 */
template<class F>
auto run_ensemble(std::size_t n, unsigned threads, F&& f)
    -> std::vector<decltype(f(std::size_t{}))>
{
    using R = decltype(f(std::size_t{}));
    std::vector<R> out(n);
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

    constexpr std::size_t chunk = 64;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex err_mutex;
    std::size_t err_index = n;
    std::exception_ptr err;

    auto worker = [&] {
        while (!stop.load(std::memory_order_relaxed))
        {
            std::size_t const begin = next.fetch_add(chunk);
            if (begin >= n)
                return;
            std::size_t const end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i)
            {
                try
                {
                    out[i] = f(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (i < err_index)
                    {
                        err_index = i;
                        err = std::current_exception();
                    }
                    stop = true;
                    return;
                }
            }
        }
    };

    if (threads == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (err)
        std::rethrow_exception(err);
    return out;
}

}  // namespace csbp
