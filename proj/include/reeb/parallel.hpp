#pragma once

#include <atomic>

#ifdef REEB_HAVE_OPENMP
#include <omp.h>
#endif

namespace reeb {

// Runtime switch between the OpenMP kernels and their serial reference
// paths. Tests run both and compare; REEB_SERIAL=1 in the environment or
// set_parallel_enabled(false) forces the serial path.
inline std::atomic<bool>& parallel_flag() {
  static std::atomic<bool> flag{true};
  return flag;
}
inline bool parallel_enabled() {
#ifdef REEB_HAVE_OPENMP
  return parallel_flag().load();
#else
  return false;
#endif
}
inline void set_parallel_enabled(bool on) { parallel_flag().store(on); }

template <class F>
void parallel_for(int n, F&& f) {
  if (parallel_enabled()) {
#ifdef REEB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) f(i);
    return;
#endif
  }
  for (int i = 0; i < n; ++i) f(i);
}

}  // namespace reeb
