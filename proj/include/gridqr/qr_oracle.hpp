#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gridqr/dense_matrix.hpp"

namespace gridqr {

struct QrFactors {
  DenseMatrix q;  // m×n, orthonormal columns
  DenseMatrix r;  // n×n, upper triangular
};

/// Householder QR, the independent oracle the Cholesky-based algorithms are
/// verified against. m ≥ n. Rank deficiency is tolerated (the factorization
/// stays valid; check min |r_jj| if you care).
QrFactors householder_qr(const DenseMatrix& a);

/// Flips signs so that diag(R) ≥ 0, which makes the factorization of a
/// full-rank matrix unique and comparisons well defined.
void sign_normalize(QrFactors& f);

double min_abs_diag(const DenseMatrix& r);

/// Seeded standard normal deviates via explicit Box–Muller so streams are
/// reproducible independent of the standard library.
class NormalRng {
 public:
  explicit NormalRng(uint64_t seed) : eng_(seed) {}
  double next();
  DenseMatrix matrix(int rows, int cols);

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Test matrix with κ₂(A) = cond by construction: A = U·diag(σ)·Vᵀ with
/// singular values geometrically spaced from 1 down to 1/cond and U, V
/// orthonormal factors obtained from Householder QR of seeded normal
/// matrices. Deterministic: same (m, n, cond, seed) gives bitwise-identical
/// output. Requires m ≥ n and cond ≥ 1.
DenseMatrix gen_test_matrix(int m, int n, double cond, uint64_t seed);

/// Singular values by one-sided Jacobi, descending. Used to verify the
/// condition number of generated matrices.
std::vector<double> singular_values(const DenseMatrix& a);

}  // namespace gridqr
