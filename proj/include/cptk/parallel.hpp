#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace cptk {

// Runs fn(0..n-1) across `jobs` threads. Results must be written to
// index-addressed slots by the caller, which is what makes the output
// independent of scheduling. If any calls throw, the exception of the
// smallest index is rethrown so failures are reproducible too.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
    if (jobs < 1) jobs = 1;
    const size_t workers = std::min(static_cast<size_t>(jobs), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n);
    std::atomic<size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    for (size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
    }
}

}  // namespace cptk
