#include "fracvar/threads.hpp"

#include <atomic>
#include <cstdlib>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace fracvar {

namespace {

// -1 = not initialised yet, 0 = automatic, >0 = explicit cap.
std::atomic<int> g_cap{-1};

int read_env() {
  const char* s = std::getenv("FRACVAR_THREADS");
  if (s == nullptr) return 0;
  int v = std::atoi(s);
  return v > 0 ? v : 0;
}

}  // namespace

void set_max_threads(int n) { g_cap.store(n > 0 ? n : 0); }

int max_threads() {
  int cap = g_cap.load();
  if (cap < 0) {
    cap = read_env();
    g_cap.store(cap);
  }
#if defined(_OPENMP)
  int hw = omp_get_max_threads();
#else
  int hw = 1;
#endif
  if (cap == 0) return hw > 0 ? hw : 1;
  return cap < hw ? cap : hw;
}

}  // namespace fracvar
