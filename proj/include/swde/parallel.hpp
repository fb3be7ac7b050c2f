#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace swde {

inline unsigned default_thread_count()
{
  return std::max(1u, std::thread::hardware_concurrency());
}

//! Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
//! handed out dynamically; callers write results into slot i so the
//! outcome does not depend on scheduling. The first exception is rethrown.
template<typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    for (unsigned t = 0; t < n; ++t)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace swde
