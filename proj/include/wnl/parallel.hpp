#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace wnl {

/// Worker count: WNL_THREADS if set and positive, else the hardware concurrency.
unsigned thread_count();

/// Runs fn(begin, end) over a static partition of [0, n). Blocks until done.
template <class F>
void parallel_blocks(std::size_t n, F&& fn, std::size_t min_block = 64) {
    unsigned t = thread_count();
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(t, (n + min_block - 1) / min_block);
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t b = w * n / workers, e = (w + 1) * n / workers;
        pool.emplace_back([&, w, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

template <class F>
void parallel_for(std::size_t n, F&& fn, std::size_t min_block = 64) {
    parallel_blocks(
        n,
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) fn(i);
        },
        min_block);
}

struct ArgMax {
    std::size_t index = 0;
    double value = -std::numeric_limits<double>::infinity();
};

/// Deterministic max-reduction; the first index attaining the maximum wins.
template <class F>
ArgMax parallel_argmax(std::size_t n, F&& score, std::size_t min_block = 16) {
    unsigned t = thread_count();
    std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(t, (n + min_block - 1) / min_block));
    std::vector<ArgMax> partial(workers);
    parallel_blocks(
        workers,
        [&](std::size_t wb, std::size_t we) {
            for (std::size_t w = wb; w < we; ++w) {
                std::size_t b = w * n / workers, e = (w + 1) * n / workers;
                ArgMax best{b, -std::numeric_limits<double>::infinity()};
                for (std::size_t i = b; i < e; ++i) {
                    double v = score(i);
                    if (v > best.value) best = {i, v};
                }
                partial[w] = best;
            }
        },
        1);
    ArgMax best;
    for (const auto& p : partial)
        if (p.value > best.value) best = p;
    return best;
}

}  // namespace wnl
