#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include "fareval/types.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fareval {

// Caps the OpenMP worker count for subsequent parallel loops; n <= 0
// leaves the runtime default untouched.
inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(i) for i in [0, n). Under Exec::Parallel the iterations are
// distributed with OpenMP; exceptions are captured per index and the
// lowest-index one is rethrown on the calling thread, so failures are
// reported independently of the schedule.
template <typename Body>
void parallel_for_each(std::size_t n, Exec exec, Body&& body) {
#ifdef _OPENMP
  if (exec == Exec::Parallel && n > 1) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<bool> failed{false};
    const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
    if (failed.load()) {
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    return;
  }
#endif
  (void)exec;
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace fareval
