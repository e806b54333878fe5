#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kdvlab::detail {

/// Runs f(i) for 0 <= i < count on up to `jobs` threads. The first exception
/// is rethrown after all workers stop.
template <class F>
void parallel_for(int count, int jobs, F&& f) {
    jobs = std::clamp(jobs, 1, std::max(count, 1));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&] {
        for (int i; (i = next.fetch_add(1)) < count;) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> ts;
    for (int j = 0; j < jobs; ++j) ts.emplace_back(work);
    for (auto& t : ts) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace kdvlab::detail
