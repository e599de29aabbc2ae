#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tacsim {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads using a static
/// interleaved schedule. The first exception (lowest index) is rethrown
/// after all workers join.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mutex;
  std::exception_ptr first;
  std::size_t first_index = n;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mutex);
            if (i < first_index) {
              first_index = i;
              first = std::current_exception();
            }
            return;
          }
        }
      });
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace tacsim
