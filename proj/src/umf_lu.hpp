#pragma once

// Thin RAII wrapper over UMFPACK's complex/int interface. METIS ordering keeps
// the fill well below the default AMD choice on Liouvillians.

#include <umfpack.h>

#include <string>

#include "onedim/hilbert.hpp"

namespace onedim::detail {

class UmfLU {
 public:
  explicit UmfLU(const SpMat& A) : A_(A) {
    umfpack_zi_defaults(control_);
    control_[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    const int n = int(A_.rows());
    status_ = umfpack_zi_symbolic(n, n, A_.outerIndexPtr(), A_.innerIndexPtr(), values(), nullptr, &symbolic_,
                                  control_, info_);
    if (status_ == UMFPACK_OK)
      status_ = umfpack_zi_numeric(A_.outerIndexPtr(), A_.innerIndexPtr(), values(), nullptr, symbolic_,
                                   &numeric_, control_, info_);
  }
  ~UmfLU() {
    if (numeric_) umfpack_zi_free_numeric(&numeric_);
    if (symbolic_) umfpack_zi_free_symbolic(&symbolic_);
  }
  UmfLU(const UmfLU&) = delete;
  UmfLU& operator=(const UmfLU&) = delete;

  bool ok() const { return status_ == UMFPACK_OK; }
  std::string message() const { return "UMFPACK status " + std::to_string(status_); }

  // A x = b, with UMFPACK's own iterative refinement
  CVec solve(const CVec& b) const { return run(UMFPACK_A, b); }
  // A^H x = b
  CVec solve_adjoint(const CVec& b) const { return run(UMFPACK_At, b); }

 private:
  const double* values() const { return reinterpret_cast<const double*>(A_.valuePtr()); }
  CVec run(int sys, const CVec& b) const {
    CVec x(b.size());
    double info[UMFPACK_INFO];
    umfpack_zi_solve(sys, A_.outerIndexPtr(), A_.innerIndexPtr(), values(), nullptr,
                     reinterpret_cast<double*>(x.data()), nullptr, reinterpret_cast<const double*>(b.data()),
                     nullptr, numeric_, control_, info);
    return x;
  }

  const SpMat& A_;
  double control_[UMFPACK_CONTROL];
  double info_[UMFPACK_INFO];
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
  int status_ = 0;
};

}  // namespace onedim::detail
