#pragma once

#include <stdexcept>
#include <string>

#include "gridqr/dense_matrix.hpp"
#include "gridqr/kernels.hpp"

namespace gridqr {

/// A nonpositive Cholesky pivot. Carries the (global) pivot index so callers
/// working on submatrices can report the position in the full matrix.
class numerical_breakdown : public std::runtime_error {
 public:
  numerical_breakdown(int pivot, double value, const std::string& what)
      : std::runtime_error(what), pivot_index(pivot), pivot_value(value) {}
  int pivot_index;
  double pivot_value;
};

/// L·Lᵀ = A for symmetric positive definite A; L lower triangular with
/// positive diagonal. Counts 2n³/3 flops.
DenseMatrix chol(const DenseMatrix& a, FlopCounter* fc = nullptr, int pivot_offset = 0);

struct CholInvResult {
  DenseMatrix l;  // lower triangular, L·Lᵀ = A
  DenseMatrix y;  // lower triangular, Y = L⁻¹
};

/// Halving recursion computing the Cholesky factor and its inverse together:
///   L11,Y11 = cholinv(A11);  L21 = A21·Y11ᵀ;
///   L22,Y22 = cholinv(A22 − L21·L21ᵀ);  Y21 = −Y22·L21·Y11.
/// Base case n=1. Requires n to be a power of two (callers pad otherwise).
/// Flops are counted as executed with triangular-aware kernels (≈ 2n³/3
/// leading order).
CholInvResult cholinv(const DenseMatrix& a, FlopCounter* fc = nullptr, int pivot_offset = 0);

/// cholinv for any n: embeds A into diag(A, I) at the next power of two,
/// factors, and strips. The identity extension factors exactly, so the
/// leading blocks of L and Y are unchanged.
CholInvResult cholinv_padded(const DenseMatrix& a, FlopCounter* fc = nullptr,
                             int pivot_offset = 0);

}  // namespace gridqr
