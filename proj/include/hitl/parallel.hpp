#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hitl {

// Worker count for parallel sections: HITL_WORKERS if set (>= 1), otherwise
// hardware concurrency. Results never depend on this value; only wall time
// does.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("HITL_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace detail {
inline thread_local bool in_parallel_section = false;
}

// Runs f(index) for index in [0, n) across workers. Each index is claimed
// exactly once; callers keep determinism by writing into per-index slots
// and reducing in index order afterwards. Nested calls run sequentially on
// the calling worker.
template <class F>
void parallel_for_index(std::size_t n, F&& f) {
    const std::size_t workers =
        detail::in_parallel_section ? 1 : std::min(worker_count(), n ? n : std::size_t{1});
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        try {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                f(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);  // drain remaining work
        }
    };
    auto worker = [&run] {
        detail::in_parallel_section = true;
        run();
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    detail::in_parallel_section = true;
    run();
    detail::in_parallel_section = false;
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace hitl
