#include "gridqr/dist_matrix.hpp"

#include <stdexcept>

#include "gridqr/kernels.hpp"

namespace gridqr {

namespace {

int ceil_multiple(int v, int m) { return ((v + m - 1) / m) * m; }

void validate_arrangement(const GridShape& g, int pr, int pc) {
  if (pr < 1 || pc < 1) throw std::invalid_argument("DistMatrix: pr, pc must be >= 1");
  if (g.d % pr != 0)
    throw std::invalid_argument("DistMatrix: pr must divide the grid height d");
  if (g.c % pc != 0)
    throw std::invalid_argument("DistMatrix: pc must divide the grid width c");
}

struct ClassOf {
  int ry, rx;
};
ClassOf class_of(const DistMatrix& a, const RankCoord& r) {
  return {r.y % a.pr, r.x % a.pc};
}

DenseMatrix local_block_of(const DenseMatrix& a, int pr, int pc, int ry, int rx) {
  DenseMatrix b(a.rows / pr, a.cols / pc);
  for (int i = 0; i < b.rows; ++i)
    for (int j = 0; j < b.cols; ++j) b.at(i, j) = a.at(i * pr + ry, j * pc + rx);
  return b;
}

}  // namespace

Rat DistMatrix::charged_block_words() const {
  if (structure == MatStructure::General)
    return Rat(static_cast<long long>(block_rows()) * block_cols());
  return tri_words(grows) / Rat(static_cast<long long>(pr) * pc);
}

DistMatrix scatter_cyclic(const DenseMatrix& a, const GridShape& g, int pr, int pc,
                          PadMode pad, MatStructure structure) {
  validate_arrangement(g, pr, pc);

  DenseMatrix ap = a;
  if (pad == PadMode::Forbid) {
    if (a.rows % pr != 0 || a.cols % pc != 0)
      throw std::invalid_argument("scatter_cyclic: dims not divisible by the arrangement");
  } else if (pad == PadMode::ZeroRowsUnitCols) {
    const int np = ceil_multiple(a.cols, pc);
    const int extra_cols = np - a.cols;
    const int mp = ceil_multiple(a.rows + extra_cols, pr);
    if (mp != a.rows || np != a.cols) {
      ap = DenseMatrix(mp, np);
      for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) ap.at(i, j) = a.at(i, j);
      // Unit-extension columns in appended zero rows: the padded Gram is
      // block diagonal, so the QR of the original block nests exactly.
      for (int k = 0; k < extra_cols; ++k) ap.at(a.rows + k, a.cols + k) = 1.0;
    }
  } else {  // IdentityExtend
    if (a.rows != a.cols)
      throw std::invalid_argument("scatter_cyclic: identity extension needs a square matrix");
    int np = a.rows;
    while (np % pr != 0 || np % pc != 0) ++np;
    if (np != a.rows) {
      ap = DenseMatrix(np, np);
      for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) ap.at(i, j) = a.at(i, j);
      for (int i = a.rows; i < np; ++i) ap.at(i, i) = 1.0;
    }
  }

  DistMatrix dist;
  dist.grid = g;
  dist.pr = pr;
  dist.pc = pc;
  dist.grows = ap.rows;
  dist.gcols = ap.cols;
  dist.orig_rows = a.rows;
  dist.orig_cols = a.cols;
  dist.structure = structure;
  dist.blocks = BlockMap(g);
  for (int z = 0; z < g.c; ++z)
    for (int y = 0; y < g.d; ++y)
      for (int x = 0; x < g.c; ++x)
        dist.blocks.at({x, y, z}) = local_block_of(ap, pr, pc, y % pr, x % pc);
  return dist;
}

void check_replication(const DistMatrix& a) {
  const GridShape& g = a.grid;
  for (int z = 0; z < g.c; ++z)
    for (int y = 0; y < g.d; ++y)
      for (int x = 0; x < g.c; ++x) {
        auto cls = class_of(a, {x, y, z});
        const DenseMatrix& rep = a.block({cls.rx, cls.ry, 0});
        if (!(a.block({x, y, z}) == rep))
          throw std::runtime_error("replication invariant violated at rank (" +
                                   std::to_string(x) + "," + std::to_string(y) + "," +
                                   std::to_string(z) + ")");
      }
}

DenseMatrix gather_padded(const DistMatrix& a) {
  check_replication(a);
  DenseMatrix out(a.grows, a.gcols);
  for (int ry = 0; ry < a.pr; ++ry)
    for (int rx = 0; rx < a.pc; ++rx) {
      const DenseMatrix& b = a.block({rx, ry, 0});
      for (int i = 0; i < b.rows; ++i)
        for (int j = 0; j < b.cols; ++j) out.at(i * a.pr + ry, j * a.pc + rx) = b.at(i, j);
    }
  return out;
}

DenseMatrix gather(const DistMatrix& a) {
  DenseMatrix full = gather_padded(a);
  if (full.rows == a.orig_rows && full.cols == a.orig_cols) return full;
  DenseMatrix out(a.orig_rows, a.orig_cols);
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.at(i, j) = full.at(i, j);
  return out;
}

namespace {

struct QuadOffsets {
  int row_off, col_off;
};

QuadOffsets quad_offsets(const DistMatrix& a, Quadrant q) {
  if (a.grows % 2 != 0 || a.gcols % 2 != 0)
    throw std::invalid_argument("subview: odd dimension");
  if ((a.grows / 2) % a.pr != 0 || (a.gcols / 2) % a.pc != 0)
    throw std::invalid_argument("subview: quadrant not divisible by the arrangement");
  switch (q) {
    case Quadrant::A11: return {0, 0};
    case Quadrant::A21: return {a.grows / 2, 0};
    case Quadrant::A12: return {0, a.gcols / 2};
    case Quadrant::A22: return {a.grows / 2, a.gcols / 2};
  }
  throw std::invalid_argument("subview: bad quadrant");
}

}  // namespace

DistMatrix subview(const DistMatrix& a, Quadrant q) {
  auto off = quad_offsets(a, q);
  const int lr0 = off.row_off / a.pr, lc0 = off.col_off / a.pc;
  DistMatrix out;
  out.grid = a.grid;
  out.pr = a.pr;
  out.pc = a.pc;
  out.grows = out.orig_rows = a.grows / 2;
  out.gcols = out.orig_cols = a.gcols / 2;
  const bool diag = (q == Quadrant::A11 || q == Quadrant::A22);
  out.structure = diag ? a.structure : MatStructure::General;
  out.blocks = BlockMap(a.grid);
  const int lr = out.grows / a.pr, lc = out.gcols / a.pc;
  for (int id = 0; id < a.grid.p(); ++id) {
    RankCoord r = coord_of(a.grid, id);
    const DenseMatrix& src = a.block(r);
    DenseMatrix b(lr, lc);
    for (int i = 0; i < lr; ++i)
      for (int j = 0; j < lc; ++j) b.at(i, j) = src.at(lr0 + i, lc0 + j);
    out.block(r) = std::move(b);
  }
  return out;
}

void set_quadrant(DistMatrix& dest, Quadrant q, const DistMatrix& src) {
  auto off = quad_offsets(dest, q);
  if (src.grows != dest.grows / 2 || src.gcols != dest.gcols / 2 || src.pr != dest.pr ||
      src.pc != dest.pc)
    throw std::invalid_argument("set_quadrant: arrangement mismatch");
  const int lr0 = off.row_off / dest.pr, lc0 = off.col_off / dest.pc;
  for (int id = 0; id < dest.grid.p(); ++id) {
    RankCoord r = coord_of(dest.grid, id);
    const DenseMatrix& b = src.block(r);
    DenseMatrix& d = dest.block(r);
    for (int i = 0; i < b.rows; ++i)
      for (int j = 0; j < b.cols; ++j) d.at(lr0 + i, lc0 + j) = b.at(i, j);
  }
}

DistMatrix colsplit(const DistMatrix& a, bool left) {
  if (a.gcols % 2 != 0 || (a.gcols / 2) % a.pc != 0)
    throw std::invalid_argument("colsplit: columns not divisible");
  DistMatrix out;
  out.grid = a.grid;
  out.pr = a.pr;
  out.pc = a.pc;
  out.grows = out.orig_rows = a.grows;
  out.gcols = out.orig_cols = a.gcols / 2;
  out.structure = MatStructure::General;
  out.blocks = BlockMap(a.grid);
  const int lc = out.gcols / a.pc, lc0 = left ? 0 : lc;
  for (int id = 0; id < a.grid.p(); ++id) {
    RankCoord r = coord_of(a.grid, id);
    const DenseMatrix& src = a.block(r);
    DenseMatrix b(src.rows, lc);
    for (int i = 0; i < src.rows; ++i)
      for (int j = 0; j < lc; ++j) b.at(i, j) = src.at(i, lc0 + j);
    out.block(r) = std::move(b);
  }
  return out;
}

DistMatrix colconcat(const DistMatrix& a, const DistMatrix& b) {
  if (a.grows != b.grows || a.pr != b.pr || a.pc != b.pc || !(a.grid == b.grid))
    throw std::invalid_argument("colconcat: arrangement mismatch");
  DistMatrix out;
  out.grid = a.grid;
  out.pr = a.pr;
  out.pc = a.pc;
  out.grows = out.orig_rows = a.grows;
  out.gcols = out.orig_cols = a.gcols + b.gcols;
  out.structure = MatStructure::General;
  out.blocks = BlockMap(a.grid);
  for (int id = 0; id < a.grid.p(); ++id) {
    RankCoord r = coord_of(a.grid, id);
    const DenseMatrix &ba = a.block(r), &bb = b.block(r);
    DenseMatrix m(ba.rows, ba.cols + bb.cols);
    for (int i = 0; i < ba.rows; ++i) {
      for (int j = 0; j < ba.cols; ++j) m.at(i, j) = ba.at(i, j);
      for (int j = 0; j < bb.cols; ++j) m.at(i, ba.cols + j) = bb.at(i, j);
    }
    out.block(r) = std::move(m);
  }
  return out;
}

DistMatrix local_transpose_exchange(const DistMatrix& a, CostLedger& ledger) {
  if (a.pr != a.pc)
    throw std::invalid_argument("local_transpose_exchange: non-square arrangement");
  if (a.grows != a.gcols)
    throw std::invalid_argument("local_transpose_exchange: non-square matrix");
  const int q = a.pr;
  DistMatrix out = a;
  out.orig_rows = a.orig_cols;
  out.orig_cols = a.orig_rows;
  if (a.structure == MatStructure::LowerTri) out.structure = MatStructure::UpperTri;
  else if (a.structure == MatStructure::UpperTri) out.structure = MatStructure::LowerTri;

  // Mirror partner: swap the two cyclic residues, keep everything else.
  auto partner = [&](const RankCoord& r) {
    const int rx = r.x % q, ry = r.y % q;
    return RankCoord{r.x - rx + ry, r.y - ry + rx, r.z};
  };
  for (int id = 0; id < a.grid.p(); ++id) {
    RankCoord r = coord_of(a.grid, id);
    RankCoord p = partner(r);
    if (rank_id(a.grid, p) > id) std::swap(out.block(r), out.block(p));
  }
  for (auto& b : out.blocks.blocks) b = kernels::transpose(b);

  ledger.charge("transpose[arrangement]",
                t_transpose(a.charged_block_words(), static_cast<long long>(q) * q));
  return out;
}

DistMatrix dist_sub(const DistMatrix& a, const DistMatrix& b, CostLedger& ledger) {
  if (a.grows != b.grows || a.gcols != b.gcols || a.pr != b.pr || a.pc != b.pc)
    throw std::invalid_argument("dist_sub: arrangement mismatch");
  DistMatrix out = a;
  out.structure = MatStructure::General;
  for (int id = 0; id < a.grid.p(); ++id)
    out.blocks.blocks[id] = kernels::sub(a.blocks.blocks[id], b.blocks.blocks[id]);
  ledger.charge_flops("axpy",
                      Rat(static_cast<long long>(a.block_rows()) * a.block_cols()));
  return out;
}

std::vector<RankCoord> owner_ranks(const DistMatrix& a) {
  std::vector<RankCoord> out;
  for (int ry = 0; ry < a.pr; ++ry)
    for (int rx = 0; rx < a.pc; ++rx) out.push_back({rx, ry, 0});
  return out;
}

}  // namespace gridqr
