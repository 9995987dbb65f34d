#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "onedim/hilbert.hpp"

namespace onedim {

// Compressed-row copy of a Liouvillian, the layout the matvec kernels walk.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<cd> val;

  static CsrMatrix from(const SpMat& A);
  std::size_t nnz() const { return val.size(); }
};

// y = A x
void matvec_serial(const CsrMatrix& A, const cd* x, cd* y);
void matvec_parallel(const CsrMatrix& A, const cd* x, cd* y);

// Picks the parallel kernel when the matrix is large enough to pay for it.
void matvec(const CsrMatrix& A, const cd* x, cd* y);

int max_threads();
void set_threads(int n);
bool parallel_enabled();

}  // namespace onedim
