#include "ctrec/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>

namespace ctrec {

namespace {
int g_jobs = 0;
}

void set_jobs(int j) { g_jobs = j < 0 ? 0 : j; }

int jobs() { return g_jobs; }

int threads_for(int n) {
#ifdef _OPENMP
  int maxt = g_jobs > 0 ? g_jobs : omp_get_max_threads();
  return std::max(1, std::min(n, maxt));
#else
  (void)n;
  return 1;
#endif
}

}  // namespace ctrec
