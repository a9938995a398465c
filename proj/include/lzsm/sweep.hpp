#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lzsm {

// Runs task(i) for every i in [0, count) on up to `threads` workers.  Tasks
// must be independent; the first exception thrown by any task is rethrown
// after all workers have stopped.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& task);

// Evaluates fn(i) for every index and returns the results in index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
    std::vector<T> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace lzsm
