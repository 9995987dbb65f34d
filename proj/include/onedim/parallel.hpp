#pragma once

#include <exception>
#include <vector>

#ifdef ONEDIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace onedim {

// Runs body(i) for i in [0, n) across OpenMP threads. Results go wherever body
// writes them, so order is fixed by i. The exception of the lowest failing
// index is rethrown with its original type.
template <class Body>
void parallel_for(int n, Body&& body) {
  std::vector<std::exception_ptr> err(n > 0 ? n : 0);
#ifdef ONEDIM_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      err[i] = std::current_exception();
    }
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

}  // namespace onedim
