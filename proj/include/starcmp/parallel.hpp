#ifndef STARCMP_PARALLEL_HPP
#define STARCMP_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace starcmp::par {

// Process-wide switch between the OpenMP kernels and their serial path.
// Every parallel loop in the library writes disjoint output ranges and keeps
// a fixed summation order inside each slice/mode, so results are identical
// bit for bit whichever path runs.
bool enabled();
void set_enabled(bool on);
int max_threads();
void set_max_threads(int n);

// Exceptions may not unwind out of an OpenMP region; the first one thrown by
// any iteration is captured and rethrown after the loop joins.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  if (enabled()) {
#ifdef _OPENMP
    std::exception_ptr first;
    std::mutex m;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(m);
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace starcmp::par

#endif
