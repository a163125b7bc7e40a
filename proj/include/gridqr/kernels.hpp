#pragma once

#include "gridqr/dense_matrix.hpp"
#include "gridqr/rational.hpp"

namespace gridqr {

/// Counts floating point operations as executed, using the sequential cost
/// conventions: axpy(m,n)=mn, MM(m,n,k)=2mnk, Syrk(m,n)=mn², Chol(n)=2n³/3.
/// Triangular multiplies/solves count mn² (structural zeros are skipped).
/// Exact rational so the 2n³/3 charges stay exact in tests.
struct FlopCounter {
  Rat flops;

  void add(const Rat& f) { flops += f; }
  void add_axpy(long long m, long long n) { flops += Rat(m * n); }
  void add_mm(long long m, long long n, long long k) { flops += Rat(2 * m * n * k); }
  void add_syrk(long long m, long long n) { flops += Rat(m * n * n); }
  void add_chol(long long n) { flops += Rat(2 * n * n * n, 3); }
  void add_trmm(long long m, long long n) { flops += Rat(m * n * n); }
};

namespace kernels {

/// C = A·B
DenseMatrix mm(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc = nullptr);
/// C = Aᵀ·B
DenseMatrix mm_tn(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc = nullptr);
/// C = alpha·A·B
DenseMatrix mm_scaled(double alpha, const DenseMatrix& a, const DenseMatrix& b,
                      FlopCounter* fc = nullptr);
/// C = AᵀA (symmetric)
DenseMatrix syrk(const DenseMatrix& a, FlopCounter* fc = nullptr);
/// C = A·Aᵀ (symmetric); counted as Syrk of the transposed operand.
DenseMatrix syrk_nt(const DenseMatrix& a, FlopCounter* fc = nullptr);
/// C = A − B
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc = nullptr);
/// C = A·U with U upper triangular; zeros below the diagonal are skipped.
DenseMatrix trmm_right_upper(const DenseMatrix& a, const DenseMatrix& u,
                             FlopCounter* fc = nullptr);
/// C = A·L with L lower triangular.
DenseMatrix trmm_right_lower(const DenseMatrix& a, const DenseMatrix& l,
                             FlopCounter* fc = nullptr);
/// C = alpha·L·A with L lower triangular.
DenseMatrix trmm_left_lower(double alpha, const DenseMatrix& l, const DenseMatrix& a,
                            FlopCounter* fc = nullptr);
/// Solves X·R = B for X with R nonsingular upper triangular.
/// Throws std::domain_error on a zero diagonal entry.
DenseMatrix trsm_right_upper(const DenseMatrix& b, const DenseMatrix& r,
                             FlopCounter* fc = nullptr);

DenseMatrix transpose(const DenseMatrix& a);

/// Plain serial loops, kept as the reference implementations the OpenMP
/// kernels are tested (bitwise) and benchmarked against.
namespace serial_ref {
DenseMatrix mm(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix mm_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix syrk(const DenseMatrix& a);
DenseMatrix trmm_right_upper(const DenseMatrix& a, const DenseMatrix& u);
}  // namespace serial_ref

}  // namespace kernels
}  // namespace gridqr
