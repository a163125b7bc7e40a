#pragma once

#include "gridqr/collectives.hpp"
#include "gridqr/dense_matrix.hpp"
#include "gridqr/grid.hpp"
#include "gridqr/ledger.hpp"

namespace gridqr {

enum class MatStructure { General, LowerTri, UpperTri };

enum class PadMode {
  Forbid,         // throw on non-divisible dims
  ZeroRowsUnitCols,  // tall inputs: zero rows below, unit-extension columns right
  IdentityExtend,    // SPD intermediates: diag(A, I)
};

/// A matrix cyclically partitioned over a pr×pc process arrangement and
/// replicated everywhere else: global element (i,j) lives in the block of
/// every rank (x,y,z) with y mod pr = i mod pr and x mod pc = j mod pc, at
/// local index (i div pr, j div pc). With pr=d, pc=c this is the standard
/// slice distribution replicated across depth; with pr=pc=c it is the n×n
/// family replicated across depth and across the d/c subcubes; with
/// pr=pc=1 every rank owns a full copy.
///
/// Invariant: all ranks of a replication class hold bitwise-identical
/// blocks (check_replication).
struct DistMatrix {
  GridShape grid;
  int pr = 1;
  int pc = 1;
  int grows = 0;      // padded global dims (the dims the algorithms run on)
  int gcols = 0;
  int orig_rows = 0;  // pre-padding dims; gather strips back to these
  int orig_cols = 0;
  MatStructure structure = MatStructure::General;
  BlockMap blocks;

  int block_rows() const { return grows / pr; }
  int block_cols() const { return gcols / pc; }
  const DenseMatrix& block(const RankCoord& r) const { return blocks.at(r); }
  DenseMatrix& block(const RankCoord& r) { return blocks.at(r); }

  /// Words one rank's block is charged as: full block, or the packed
  /// triangle x(x+1)/2 spread over the pr·pc owners for triangular matrices.
  Rat charged_block_words() const;
};

/// Cyclic scatter with replication. pr must divide grid.d or be 1; pc must
/// divide grid.c or be 1.
DistMatrix scatter_cyclic(const DenseMatrix& a, const GridShape& g, int pr, int pc,
                          PadMode pad = PadMode::Forbid,
                          MatStructure structure = MatStructure::General);

/// Reassembles the global matrix from the replication-class representatives
/// and strips padding. Throws std::runtime_error if the replication
/// invariant is violated (used as a consistency probe).
DenseMatrix gather(const DistMatrix& a);
/// Same but without stripping the padding.
DenseMatrix gather_padded(const DistMatrix& a);
void check_replication(const DistMatrix& a);

enum class Quadrant { A11, A21, A12, A22 };

/// The logical quadrant as a DistMatrix over the same arrangement, realized
/// by index arithmetic on the cyclic blocks — every rank keeps an active
/// part and no communication happens. Requires even global dims divisible
/// by 2·pr / 2·pc.
DistMatrix subview(const DistMatrix& a, Quadrant q);
/// Writes `src` into the logical quadrant of `dest` (the assembly inverse of
/// subview).
void set_quadrant(DistMatrix& dest, Quadrant q, const DistMatrix& src);

/// Left or right half of the columns.
DistMatrix colsplit(const DistMatrix& a, bool left);
DistMatrix colconcat(const DistMatrix& a, const DistMatrix& b);

/// Distributed transpose: pairwise exchange between mirror ranks
/// (x,y) ↔ (y mod pr ... x) within each square slice, followed by a local
/// block transpose. Requires a square matrix on a square arrangement
/// (pr == pc). Charges δ(pr·pc)·(α + w·β) once with w the per-rank
/// (packed, if triangular) word count; diagonal ranks exchange nothing.
DistMatrix local_transpose_exchange(const DistMatrix& a, CostLedger& ledger);

/// Elementwise A − B on matching arrangements; charges one rank's axpy.
DistMatrix dist_sub(const DistMatrix& a, const DistMatrix& b, CostLedger& ledger);

/// Ranks whose blocks are the canonical replication-class representatives
/// (z = 0, y < pr, x < pc).
std::vector<RankCoord> owner_ranks(const DistMatrix& a);

}  // namespace gridqr
