#pragma once

#include <cstddef>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oppbandit {

// Runs body(i) for i in [0, n). jobs <= 1 uses the plain serial loop; larger
// values dispatch iterations to an OpenMP pool. Results must be written to
// disjoint slots so that the outcome is identical for any jobs value.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body) {
#ifdef _OPENMP
  if (jobs > 1 && n > 1) {
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(oppbandit_parallel_for_err)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#endif
  (void)jobs;
  for (std::size_t i = 0; i < n; ++i) body(i);
}

inline int hardware_jobs() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

} // namespace oppbandit
