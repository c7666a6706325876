#include "util.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace morphbb {

unsigned resolve_thread_count(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("MORPHBB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n_jobs, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (n_jobs == 0) return;
    if (threads <= 1 || n_jobs == 1) {
        for (std::size_t i = 0; i < n_jobs; i++) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_jobs) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<std::size_t>(threads, n_jobs);
    pool.reserve(n);
    for (unsigned t = 0; t < n; t++) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace morphbb
