#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pflow {

// Runs body(k) for k in [0, count) on up to hardware_concurrency threads; rethrows the first error.
template <class F>
void parallel_for(int count, F body) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(count, 1))));
    if (workers <= 1) {
        for (int k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int k; (k = next.fetch_add(1)) < count;) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace pflow
