#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace densedex {

inline size_t default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<size_t>(hw);
}

// Runs fn(task_index) for task_index in [0, tasks) on up to `workers`
// threads. Worker w takes tasks w, w+W, w+2W, ... so the task-to-worker
// assignment is fixed; callers own any ordering of result assembly.
template <typename Fn>
void parallel_tasks(size_t tasks, size_t workers, Fn&& fn) {
  if (tasks == 0) return;
  if (workers <= 1 || tasks == 1) {
    for (size_t t = 0; t < tasks; ++t) fn(t);
    return;
  }
  const size_t w = std::min(workers, tasks);
  std::vector<std::thread> pool;
  pool.reserve(w);
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (size_t wi = 0; wi < w; ++wi) {
    pool.emplace_back([&, wi] {
      try {
        for (size_t t = wi; t < tasks; t += w) fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace densedex
