#include "onedim/kernels.hpp"

#ifdef ONEDIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace onedim {

CsrMatrix CsrMatrix::from(const SpMat& A) {
  Eigen::SparseMatrix<cd, Eigen::RowMajor> R = A;
  R.makeCompressed();
  CsrMatrix m;
  m.rows = int(R.rows());
  m.cols = int(R.cols());
  m.row_ptr.assign(R.outerIndexPtr(), R.outerIndexPtr() + R.rows() + 1);
  m.col.assign(R.innerIndexPtr(), R.innerIndexPtr() + R.nonZeros());
  m.val.assign(R.valuePtr(), R.valuePtr() + R.nonZeros());
  return m;
}

void matvec_serial(const CsrMatrix& A, const cd* x, cd* y) {
  for (int i = 0; i < A.rows; ++i) {
    cd acc = 0.0;
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) acc += A.val[k] * x[A.col[k]];
    y[i] = acc;
  }
}

void matvec_parallel(const CsrMatrix& A, const cd* x, cd* y) {
  const int n = A.rows;
  const int* rp = A.row_ptr.data();
  const int* ci = A.col.data();
  const cd* v = A.val.data();
#ifdef ONEDIM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) {
    // split re/im so the inner loop stays in real arithmetic
    double re = 0.0, im = 0.0;
    for (int k = rp[i]; k < rp[i + 1]; ++k) {
      const cd a = v[k], b = x[ci[k]];
      re += a.real() * b.real() - a.imag() * b.imag();
      im += a.real() * b.imag() + a.imag() * b.real();
    }
    y[i] = cd(re, im);
  }
}

void matvec(const CsrMatrix& A, const cd* x, cd* y) {
#ifdef ONEDIM_HAVE_OPENMP
  if (A.nnz() > 20000 && !omp_in_parallel() && omp_get_max_threads() > 1) {
    matvec_parallel(A, x, y);
    return;
  }
#endif
  matvec_serial(A, x, y);
}

int max_threads() {
#ifdef ONEDIM_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef ONEDIM_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

bool parallel_enabled() {
#ifdef ONEDIM_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace onedim
