/*
 * OpenMP shim. Parallel constructs go through NGAS_OMP so the library still
 * builds (serially) without OpenMP. Do not include <omp.h> elsewhere.
 */
#pragma once

#if defined(_OPENMP)
#include <omp.h>
#define NGAS_HAVE_OMP 1
#define NGAS_PRAGMA(X) _Pragma(#X)
#define NGAS_OMP(ARGS) NGAS_PRAGMA(omp ARGS)
#else
#define NGAS_HAVE_OMP 0
#define NGAS_OMP(ARGS)
#endif

namespace ngas {

inline int max_threads() {
#if NGAS_HAVE_OMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#if NGAS_HAVE_OMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace ngas
