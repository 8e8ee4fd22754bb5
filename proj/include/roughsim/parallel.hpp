#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace roughsim {

namespace detail {

inline std::size_t threads_from_environment() {
  if (const char* env = std::getenv("ROUGHSIM_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

inline std::atomic<std::size_t>& thread_setting() {
  static std::atomic<std::size_t> setting{threads_from_environment()};
  return setting;
}

}  // namespace detail

/// Worker count used by every parallel loop in the library.
/// Defaults to ROUGHSIM_THREADS, else the hardware concurrency.
inline std::size_t thread_count() { return detail::thread_setting().load(); }

inline void set_thread_count(std::size_t count) {
  detail::thread_setting().store(std::max<std::size_t>(1, count));
}

/// Runs body(begin, end) over a static partition of [0, count).
/// The partition depends only on (count, thread_count()), and each index is
/// processed exactly once, so per-index results never depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  if (count == 0) return;
  const std::size_t workers = std::min(thread_count(), count);
  if (workers == 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace roughsim
