#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridqr/dist_matrix.hpp"
#include "gridqr/factor.hpp"

namespace gridqr {

/// InvertAll: the factorization computes the full triangular inverse and the
/// orthogonal factor comes from one multiplication. InvertSplit: the inverse
/// is computed at every recursion level but the first, leaving two half-size
/// inverted blocks; the orthogonal factor is then assembled with three
/// half-size multiplications and one update (a blocked triangular solve with
/// inverted diagonal blocks).
enum class QrVariant { InvertAll, InvertSplit };

std::string to_string(QrVariant v);

struct QrDiagnostics {
  double orthogonality = 0.0;            // ‖QᵀQ − I‖_F of the gathered Q
  double residual = 0.0;                 // ‖A − QR‖_F / ‖A‖_F, gathered
  double first_pass_orthogonality = 0.0; // recorded between the two passes
};

struct QrResult {
  DistMatrix q;  // m×n, distributed like A
  DistMatrix r;  // n×n upper triangular with positive diagonal
  QrDiagnostics diag;
  std::vector<std::string> warnings;
};

/// C = scale·A·B over every c×c×c subcube of the grid: row/column broadcasts
/// from the diagonal roots, one local multiply per rank, and a depth
/// allreduce. Inputs must be cyclically distributed over the subcube slices
/// (pc == c, B square-arranged); A may be the tall pr == d family. The d/c
/// subcube instances are logically concurrent and charge once.
DistMatrix mm3d(const DistMatrix& a, const DistMatrix& b, CostLedger& ledger,
                double scale = 1.0);

enum class InverseMode { Full, SkipTop };

struct Cfr3dResult {
  DistMatrix l;                     // lower triangular, L·Lᵀ = A
  std::optional<DistMatrix> y;      // Y = L⁻¹ (Full mode, or a SkipTop that
                                    // bottomed out without splitting)
  std::optional<DistMatrix> y11;    // SkipTop: inverse of the leading half
  std::optional<DistMatrix> y22;    // SkipTop: inverse of the trailing half
  std::optional<DistMatrix> l21_t;  // SkipTop: the top level's transposed
                                    // subdiagonal block, reused by the solve
};

/// Recursive Cholesky factorization plus triangular inverse over the subcube
/// grids: split at n/2, two distributed transposes and four mm3d calls per
/// level, sequential factor+invert of the gathered n_o×n_o base block on
/// every rank. Requires n_o ∈ [c, n] with n/n_o a power of two.
Cfr3dResult cfr3d(const DistMatrix& a, int n_o, CostLedger& ledger,
                  InverseMode mode = InverseMode::Full);

/// Default base-case size n/c² (the point where the base-case gathers stop
/// mattering next to the multiplies), clamped to [c, n].
int default_base_size(int n, const GridShape& g);

/// 1D algorithm on a 1×P×1 grid: local Syrk, one packed-triangle allreduce,
/// a redundant sequential factor+invert on every rank, local panels for Q.
QrResult cqr_1d(const DistMatrix& a, CostLedger& ledger);
QrResult cqr2_1d(const DistMatrix& a, CostLedger& ledger);

/// 3D algorithm on a cubic grid (d == c).
QrResult cqr_3d(const DistMatrix& a, CostLedger& ledger,
                QrVariant variant = QrVariant::InvertAll, int n_o = 0);
QrResult cqr2_3d(const DistMatrix& a, CostLedger& ledger,
                 QrVariant variant = QrVariant::InvertAll, int n_o = 0);

/// Tunable-grid algorithm on a c×d×c grid (c | d): the Gram matrix is
/// assembled per subcube with a contiguous reduce, a strided allreduce and a
/// depth broadcast, then d/c simultaneous cfr3d+mm3d instances finish the
/// factorization. Degenerates exactly to the 1D algorithm at c=1 and to the
/// 3D algorithm at c=d.
QrResult cacqr(const DistMatrix& a, CostLedger& ledger,
               QrVariant variant = QrVariant::InvertAll, int n_o = 0);
QrResult cacqr2(const DistMatrix& a, CostLedger& ledger,
                QrVariant variant = QrVariant::InvertAll, int n_o = 0);

struct SeqQr {
  DenseMatrix q;
  DenseMatrix r;
};

/// Sequential single-pass and two-pass algorithms; the ledger γ follows the
/// same charged model as the distributed paths (α and β stay zero).
SeqQr seq_cqr(const DenseMatrix& a, CostLedger& ledger);
SeqQr seq_cqr2(const DenseMatrix& a, CostLedger& ledger);

/// Model flop charge of the fused sequential factor+inverse step. Pinned to
/// (3/4)n³ — the constant under which the two-pass composition totals
/// exactly 4mn²/P + 11n³/6.
Rat gamma_cholinv_step(long long n);

/// Entry validation shared by the distributed algorithms: power-of-two grid
/// factors (so the log₂ charges are exact) and c | d.
void validate_qr_grid(const GridShape& g);

}  // namespace gridqr
