// parallel.hpp — chunked parallel_for over independent index ranges.
//
// Every call site writes to disjoint output slots; reductions over the results
// happen sequentially in index order afterwards, so results are byte-identical
// for any thread count.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace krylov {

inline unsigned& thread_cap() {
    static unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    return cap;
}

inline void set_thread_cap(unsigned n) { thread_cap() = std::max(1u, n); }

// body(i) is called exactly once for each i in [0, n).
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned nthreads =
        static_cast<unsigned>(std::min<std::size_t>(thread_cap(), n ? n : 1));
    if (nthreads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += nthreads) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace krylov
