#include "lzsm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace lzsm {

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& task) {
    if (count == 0) {
        return;
    }
    const auto workers = static_cast<std::size_t>(std::max(1U, threads));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) {
                return;
            }
            try {
                task(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(std::min(workers, count));
        for (std::size_t w = 0; w < std::min(workers, count); ++w) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace lzsm
