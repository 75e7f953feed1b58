#pragma once

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace d3 {

// Parallelism budget handed down from the caller. threads == 0 means
// "whatever OpenMP would pick"; threads == 1 runs every kernel serially.
struct Exec {
  int threads = 0;

  int resolved() const {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    return 1;
#endif
  }

  static Exec serial() { return Exec{1}; }
};

}  // namespace d3
