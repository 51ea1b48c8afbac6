#pragma once

#include <cstddef>

namespace kantor::par {

// Global worker count for the data-parallel kernels (per-x operator
// application, per-pair batch evaluation, per-subset capacity LPs).
// 1 selects the serial reference path. Defaults to the OpenMP thread count.
int max_threads();
void set_max_threads(int n);

namespace detail {
void run_parallel(std::size_t n, void (*fn)(std::size_t, void*), void* ctx);
}

// Serial reference loop, kept alongside the OpenMP kernel so the two can be
// compared in tests and in the benchmark tool. Worker bodies must write only
// to their own output slot; all cross-slot reductions happen after the loop,
// which keeps results bit-identical for every thread count.
template <class F>
void for_each_index_serial(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
void for_each_index(std::size_t n, F&& f) {
  if (max_threads() <= 1 || n <= 1) {
    for_each_index_serial(n, f);
    return;
  }
  detail::run_parallel(
      n, [](std::size_t i, void* ctx) { (*static_cast<F*>(ctx))(i); }, &f);
}

}  // namespace kantor::par
