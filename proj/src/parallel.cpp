#include "kantor/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kantor::par {

namespace {
int g_max_threads = -1;  // -1: not set, use OpenMP default
}

int max_threads() {
  if (g_max_threads > 0) return g_max_threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int n) { g_max_threads = n > 0 ? n : -1; }

namespace detail {

void run_parallel(std::size_t n, void (*fn)(std::size_t, void*), void* ctx) {
#ifdef _OPENMP
  const int threads = max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    fn(static_cast<std::size_t>(i), ctx);
  }
#else
  for (std::size_t i = 0; i < n; ++i) fn(i, ctx);
#endif
}

}  // namespace detail
}  // namespace kantor::par
