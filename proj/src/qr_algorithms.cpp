#include "gridqr/qr_algorithms.hpp"

#include <functional>
#include <stdexcept>
#include <utility>

#include "gridqr/kernels.hpp"

namespace gridqr {

std::string to_string(QrVariant v) {
  return v == QrVariant::InvertAll ? "invert-all" : "invert-split";
}

Rat gamma_cholinv_step(long long n) { return Rat(3, 4) * Rat(n * n * n); }

void validate_qr_grid(const GridShape& g) {
  if (!is_pow2(g.c) || !is_pow2(g.d))
    throw std::invalid_argument("grid factors must be powers of two for exact charges");
  if (g.d % g.c != 0) throw std::invalid_argument("grid requires c | d");
}

namespace {

DistMatrix make_dist(const GridShape& g, int pr, int pc, int rows, int cols,
                     MatStructure s) {
  DistMatrix m;
  m.grid = g;
  m.pr = pr;
  m.pc = pc;
  m.grows = m.orig_rows = rows;
  m.gcols = m.orig_cols = cols;
  m.structure = s;
  m.blocks = BlockMap(g);
  for (auto& b : m.blocks.blocks) b = DenseMatrix(rows / pr, cols / pc);
  return m;
}

/// Model flop factor of a multiply: 2 general, 1 with one triangular
/// operand, 1/3 with two.
Rat mm_gamma_factor(MatStructure a, MatStructure b) {
  const bool ta = a != MatStructure::General;
  const bool tb = b != MatStructure::General;
  if (ta && tb) return Rat(1, 3);
  if (ta || tb) return Rat(1);
  return Rat(2);
}

MatStructure mm_structure(MatStructure a, MatStructure b) {
  if (a == MatStructure::LowerTri && b == MatStructure::LowerTri)
    return MatStructure::LowerTri;
  if (a == MatStructure::UpperTri && b == MatStructure::UpperTri)
    return MatStructure::UpperTri;
  return MatStructure::General;
}

template <typename F>
auto with_breakdown_hint(F&& f) {
  try {
    return f();
  } catch (const numerical_breakdown& e) {
    throw numerical_breakdown(
        e.pivot_index, e.pivot_value,
        std::string(e.what()) +
            "; the Gram matrix is numerically indefinite. The orthogonality "
            "repair of the two-pass algorithm needs kappa(A) = O(sqrt(1/eps)); "
            "reduce the condition number or precondition the input.");
  }
}

}  // namespace

DistMatrix mm3d(const DistMatrix& a, const DistMatrix& b, CostLedger& ledger,
                double scale) {
  const GridShape g = a.grid;
  const int c = g.c;
  if (!(b.grid == g)) throw std::invalid_argument("mm3d: operands on different grids");
  if (a.gcols != b.grows) throw std::invalid_argument("mm3d: dimension mismatch");
  if (a.pc != c || b.pc != c || b.pr != c || (a.pr != c && a.pr != g.d))
    throw std::invalid_argument("mm3d: operands not cyclic over the subcube slices");
  validate_qr_grid(g);

  // Row broadcast of A from the diagonal roots x=z, column broadcast of B
  // from the roots y=z of each subcube.
  BlockMap wa(g), wb(g);
  for (int z = 0; z < c; ++z)
    for (int y = 0; y < g.d; ++y)
      for (int x = 0; x < c; ++x) {
        wa.at({x, y, z}) = a.block({z, y, z});
        wb.at({x, y, z}) = b.block({x, c * (y / c) + z, z});
      }
  ledger.charge("mm3d bcast[row]", t_bcast(a.charged_block_words(), c));
  ledger.charge("mm3d bcast[column]", t_bcast(b.charged_block_words(), c));

  DistMatrix out = make_dist(g, a.pr, c, a.grows, b.gcols,
                             mm_structure(a.structure, b.structure));
  for (int y = 0; y < g.d; ++y)
    for (int x = 0; x < c; ++x) {
      DenseMatrix s;
      for (int z = 0; z < c; ++z) {
        DenseMatrix prod = kernels::mm_scaled(scale, wa.at({x, y, z}), wb.at({x, y, z}));
        if (z == 0) {
          s = std::move(prod);
        } else {
          for (size_t k = 0; k < s.data.size(); ++k) s.data[k] += prod.data[k];
        }
      }
      for (int z = 0; z < c; ++z) out.block({x, y, z}) = s;
    }
  const Rat local = Rat(static_cast<long long>(a.block_rows()) * a.block_cols() *
                        b.block_cols());
  ledger.charge_flops("mm3d local multiply",
                      mm_gamma_factor(a.structure, b.structure) * local);
  ledger.charge("mm3d allreduce[depth]", t_allreduce(out.charged_block_words(), c));
  return out;
}

int default_base_size(int n, const GridShape& g) {
  const int c = g.c;
  // Largest power-of-two ratio not exceeding c², with every level size (and
  // the base itself) staying a multiple of c so cyclic blocks never go
  // ragged. For power-of-two n this is max(n/c², c); for other n it falls
  // back toward n itself (the base is factored sequentially anyway).
  int ratio = 1;
  while (ratio < c * c && n % (2 * ratio) == 0 && (n / (2 * ratio)) % c == 0)
    ratio *= 2;
  return n / ratio;
}

namespace {

Cfr3dResult cfr3d_rec(const DistMatrix& a, int n_o, CostLedger& ledger, bool skip_top,
                      int pivot_offset) {
  const GridShape g = a.grid;
  const int c = g.c;
  const int n = a.grows;

  if (n == n_o) {
    // Base case: the block is scattered over the c×c slices; gather it onto
    // every rank and factor redundantly.
    DenseMatrix t = gather_padded(a);
    ledger.charge("cfr3d base allgather[slice]",
                  t_allgather(Rat(static_cast<long long>(n_o) * n_o),
                              static_cast<long long>(c) * c));
    CholInvResult ci = cholinv_padded(t, nullptr, pivot_offset);
    ledger.charge_flops("cfr3d base cholinv", gamma_cholinv_step(n_o));
    Cfr3dResult res{scatter_cyclic(ci.l, g, c, c, PadMode::Forbid, MatStructure::LowerTri),
                    scatter_cyclic(ci.y, g, c, c, PadMode::Forbid, MatStructure::LowerTri),
                    std::nullopt, std::nullopt, std::nullopt};
    return res;
  }

  const int h = n / 2;
  Cfr3dResult f11 = cfr3d_rec(subview(a, Quadrant::A11), n_o, ledger, false, pivot_offset);
  DistMatrix w = local_transpose_exchange(*f11.y, ledger);  // Y11ᵀ, packed words
  DistMatrix l21 = mm3d(subview(a, Quadrant::A21), w, ledger);
  DistMatrix x = local_transpose_exchange(l21, ledger);     // L21ᵀ, full words
  DistMatrix u = mm3d(l21, x, ledger);
  DistMatrix trail = dist_sub(subview(a, Quadrant::A22), u, ledger);
  Cfr3dResult f22 = cfr3d_rec(trail, n_o, ledger, false, pivot_offset + h);

  Cfr3dResult res;
  res.l = make_dist(g, c, c, n, n, MatStructure::LowerTri);
  set_quadrant(res.l, Quadrant::A11, f11.l);
  set_quadrant(res.l, Quadrant::A21, l21);
  set_quadrant(res.l, Quadrant::A22, f22.l);

  if (skip_top) {
    res.y11 = std::move(*f11.y);
    res.y22 = std::move(*f22.y);
    res.l21_t = std::move(x);
    return res;
  }
  DistMatrix u2 = mm3d(l21, *f11.y, ledger);
  DistMatrix y21 = mm3d(*f22.y, u2, ledger, -1.0);
  res.y = make_dist(g, c, c, n, n, MatStructure::LowerTri);
  set_quadrant(*res.y, Quadrant::A11, *f11.y);
  set_quadrant(*res.y, Quadrant::A21, y21);
  set_quadrant(*res.y, Quadrant::A22, *f22.y);
  return res;
}

}  // namespace

Cfr3dResult cfr3d(const DistMatrix& a, int n_o, CostLedger& ledger, InverseMode mode) {
  validate_qr_grid(a.grid);
  const int c = a.grid.c;
  if (a.grows != a.gcols) throw std::invalid_argument("cfr3d: matrix not square");
  if (a.pr != c || a.pc != c)
    throw std::invalid_argument("cfr3d: input not cyclic over the subcube slices");
  if (n_o <= 0) n_o = default_base_size(a.grows, a.grid);
  if (n_o < c || n_o > a.grows || n_o % c != 0 || a.grows % n_o != 0 ||
      !is_pow2(a.grows / n_o))
    throw std::invalid_argument(
        "cfr3d: base size must be a multiple of c in [c, n] with a "
        "power-of-two n/n_o ratio");
  return cfr3d_rec(a, n_o, ledger, mode == InverseMode::SkipTop, 0);
}

namespace {

/// Local partial Gram: every rank multiplies the root column block it
/// received against its own block. When the row group is a singleton the
/// broadcast is a self-copy and the product is a true Syrk, charged as such.
DistMatrix gram_local_multiply(const DistMatrix& a, const BlockMap& w,
                               CostLedger& ledger) {
  const GridShape g = a.grid;
  const int c = g.c;
  DistMatrix x = make_dist(g, c, c, a.gcols, a.gcols, MatStructure::General);
  for (int id = 0; id < g.p(); ++id) {
    RankCoord r = coord_of(g, id);
    x.block(r) = c == 1 ? kernels::syrk(a.block(r))
                        : kernels::mm_tn(w.at(r), a.block(r));
  }
  const long long mloc = a.block_rows(), nloc = a.block_cols();
  ledger.charge_flops("cqr gram multiply",
                      c == 1 ? Rat(mloc * nloc * nloc)
                             : Rat(2 * nloc * mloc * nloc));
  return x;
}

BlockMap row_bcast_of_a(const DistMatrix& a, CostLedger& ledger) {
  const GridShape g = a.grid;
  BlockMap w(g);
  for (int z = 0; z < g.c; ++z)
    for (int y = 0; y < g.d; ++y)
      for (int x = 0; x < g.c; ++x) w.at({x, y, z}) = a.block({z, y, z});
  ledger.charge("cqr bcast[row]", t_bcast(a.charged_block_words(), g.c));
  return w;
}

/// Gram chain of the tunable algorithm: contiguous reduce onto the roots
/// y ≡ z (mod c), strided allreduce along the root chains, depth broadcast
/// from root z = y mod c. Executed literally even when groups degenerate to
/// singletons (their charges vanish through δ and log₂).
DistMatrix gram_chain_tunable(const DistMatrix& a, CostLedger& ledger) {
  const GridShape g = a.grid;
  const int c = g.c;
  const long long nloc = a.block_cols();

  BlockMap w = row_bcast_of_a(a, ledger);
  DistMatrix x = gram_local_multiply(a, w, ledger);

  auto contig = partition(g, CommKind::YContiguous);
  std::vector<RankCoord> roots;
  roots.reserve(contig.size());
  for (const auto& comm : contig) {
    const RankCoord& first = comm.members.front();
    roots.push_back({first.x, c * (first.y / c) + first.z, first.z});
  }
  collectives::reduce_groups(x.blocks, contig, roots, ledger, Rat(nloc * nloc));

  // Only the root chains y ≡ z (mod c) carry live data into the allreduce.
  std::vector<Communicator> chains;
  for (int z = 0; z < c; ++z)
    for (int xc = 0; xc < c; ++xc) chains.push_back(subcomm(g, {xc, z, z}, CommKind::YStrided));
  // The per-rank block is the full symmetric Gram exactly when c == 1; the
  // upper triangle then suffices. For c > 1 the critical-path rank holds an
  // off-diagonal block and full words are charged.
  Rat words = c == 1 ? tri_words(a.gcols) : Rat(nloc * nloc);
  collectives::allreduce_groups(x.blocks, chains, ledger, words);

  auto depth = partition(g, CommKind::Depth);
  std::vector<RankCoord> droots;
  droots.reserve(depth.size());
  for (const auto& comm : depth) {
    const RankCoord& first = comm.members.front();
    droots.push_back({first.x, first.y, first.y % c});
  }
  collectives::bcast_groups(x.blocks, depth, droots, ledger, Rat(nloc * nloc));
  return x;
}

/// Gram chain of the cubic algorithm: full-column reduce onto the roots
/// y = z, then the depth broadcast from root z = y.
DistMatrix gram_chain_cubic(const DistMatrix& a, CostLedger& ledger) {
  const GridShape g = a.grid;
  const long long nloc = a.block_cols();

  BlockMap w = row_bcast_of_a(a, ledger);
  DistMatrix x = gram_local_multiply(a, w, ledger);

  auto cols = partition(g, CommKind::Column);
  std::vector<RankCoord> roots;
  roots.reserve(cols.size());
  for (const auto& comm : cols) {
    const RankCoord& first = comm.members.front();
    roots.push_back({first.x, first.z, first.z});
  }
  collectives::reduce_groups(x.blocks, cols, roots, ledger, Rat(nloc * nloc));

  auto depth = partition(g, CommKind::Depth);
  std::vector<RankCoord> droots;
  droots.reserve(depth.size());
  for (const auto& comm : depth) {
    const RankCoord& first = comm.members.front();
    droots.push_back({first.x, first.y, first.y % g.c});
  }
  collectives::bcast_groups(x.blocks, depth, droots, ledger, Rat(nloc * nloc));
  return x;
}

DistMatrix q_step(const DistMatrix& a, Cfr3dResult& f, CostLedger& ledger) {
  if (!f.y11) {
    // One multiplication against the transposed full inverse.
    DistMatrix rinv = local_transpose_exchange(*f.y, ledger);
    return mm3d(a, rinv, ledger);
  }
  // Blocked solve with the two inverted half blocks:
  //   Q1 = A1·Y11ᵀ,  Q2 = (A2 − Q1·L21ᵀ)·Y22ᵀ.
  // L21ᵀ was already formed (and charged) by the factorization's top level.
  DistMatrix w1 = local_transpose_exchange(*f.y11, ledger);
  DistMatrix w2 = local_transpose_exchange(*f.y22, ledger);
  DistMatrix a1 = colsplit(a, true);
  DistMatrix a2 = colsplit(a, false);
  DistMatrix q1 = mm3d(a1, w1, ledger);
  DistMatrix t = mm3d(q1, *f.l21_t, ledger);
  DistMatrix s = dist_sub(a2, t, ledger);
  DistMatrix q2 = mm3d(s, w2, ledger);
  return colconcat(q1, q2);
}

struct Pass {
  DistMatrix q;
  DistMatrix l;  // Rᵀ, lower triangular on the square arrangement
};

Pass tunable_pass(const DistMatrix& a, QrVariant variant, int n_o, CostLedger& ledger) {
  DistMatrix z = gram_chain_tunable(a, ledger);
  Cfr3dResult f = cfr3d(z, n_o, ledger,
                        variant == QrVariant::InvertSplit ? InverseMode::SkipTop
                                                          : InverseMode::Full);
  DistMatrix q = q_step(a, f, ledger);
  return {std::move(q), std::move(f.l)};
}

Pass cubic_pass(const DistMatrix& a, QrVariant variant, int n_o, CostLedger& ledger) {
  DistMatrix z = gram_chain_cubic(a, ledger);
  Cfr3dResult f = cfr3d(z, n_o, ledger,
                        variant == QrVariant::InvertSplit ? InverseMode::SkipTop
                                                          : InverseMode::Full);
  DistMatrix q = q_step(a, f, ledger);
  return {std::move(q), std::move(f.l)};
}

Pass panel_pass_1d(const DistMatrix& a, CostLedger& ledger,
                   std::vector<std::string>& warnings) {
  const GridShape g = a.grid;
  const int n = a.gcols;
  const long long mloc = a.block_rows();
  if (mloc < n)
    warnings.push_back("row panels are wider than tall (m/P < n); the 1D algorithm "
                       "is intended for m >> n");

  BlockMap xb(g);
  for (int y = 0; y < g.d; ++y) xb.at({0, y, 0}) = kernels::syrk(a.block({0, y, 0}));
  ledger.charge_flops("cqr gram multiply", Rat(mloc * n * n));

  Communicator world = subcomm(g, {0, 0, 0}, CommKind::World);
  collectives::allreduce(xb, world, ledger, tri_words(n));

  // Every rank factors its identical Gram copy; one redundant instance is
  // charged.
  CholInvResult ci = cholinv_padded(xb.at({0, 0, 0}), nullptr);
  ledger.charge_flops("cqr cholinv", gamma_cholinv_step(n));

  Pass pass;
  pass.l = make_dist(g, 1, 1, n, n, MatStructure::LowerTri);
  for (auto& b : pass.l.blocks.blocks) b = ci.l;

  DenseMatrix rinv = kernels::transpose(ci.y);
  pass.q = make_dist(g, g.d, 1, a.grows, n, MatStructure::General);
  for (int y = 0; y < g.d; ++y)
    pass.q.block({0, y, 0}) = kernels::trmm_right_upper(a.block({0, y, 0}), rinv);
  ledger.charge_flops("cqr q panels", Rat(mloc * n * n));
  return pass;
}

void fill_diagnostics(QrResult& res, const DistMatrix& a) {
  DenseMatrix ga = gather(a);
  DenseMatrix gq = gather(res.q);
  DenseMatrix gr = gather(res.r);
  res.diag.orthogonality = orthogonality_error(gq);
  res.diag.residual = rel_frobenius_diff(kernels::mm(gq, gr), ga);
}

QrResult finish_single(const DistMatrix& a, Pass&& pass, CostLedger& ledger) {
  QrResult res;
  res.q = std::move(pass.q);
  res.r = local_transpose_exchange(pass.l, ledger);
  res.q.orig_rows = a.orig_rows;
  res.q.orig_cols = a.orig_cols;
  res.r.orig_rows = res.r.orig_cols = a.orig_cols;
  fill_diagnostics(res, a);
  return res;
}

template <typename PassFn>
QrResult finish_double(const DistMatrix& a, CostLedger& ledger, PassFn&& run_pass,
                       bool product_is_local) {
  QrResult res;
  Pass p1 = run_pass(a, ledger, res.warnings);
  p1.q.orig_rows = a.orig_rows;
  p1.q.orig_cols = a.orig_cols;
  res.diag.first_pass_orthogonality = orthogonality_error(gather(p1.q));
  Pass p2 = run_pass(p1.q, ledger, res.warnings);

  // R = R2·R1 = (L1·L2)ᵀ, both factors triangular.
  DistMatrix m;
  if (product_is_local) {
    const int n = p1.l.gcols;
    DenseMatrix prod = kernels::mm(p1.l.block({0, 0, 0}), p2.l.block({0, 0, 0}));
    ledger.charge_flops("r product", Rat(static_cast<long long>(n) * n * n, 3));
    m = make_dist(a.grid, 1, 1, n, n, MatStructure::LowerTri);
    for (auto& b : m.blocks.blocks) b = prod;
  } else {
    m = mm3d(p1.l, p2.l, ledger);
  }
  res.q = std::move(p2.q);
  res.r = local_transpose_exchange(m, ledger);
  res.q.orig_rows = a.orig_rows;
  res.q.orig_cols = a.orig_cols;
  res.r.orig_rows = res.r.orig_cols = a.orig_cols;
  fill_diagnostics(res, a);
  return res;
}

void validate_1d(const DistMatrix& a) {
  validate_qr_grid(a.grid);
  if (a.grid.c != 1) throw std::invalid_argument("cqr_1d: requires a 1×P×1 grid");
  if (a.pr != a.grid.d || a.pc != 1)
    throw std::invalid_argument("cqr_1d: input must be row panels (pr=P, pc=1)");
}

void validate_tall(const DistMatrix& a, bool cubic) {
  validate_qr_grid(a.grid);
  if (cubic && a.grid.d != a.grid.c)
    throw std::invalid_argument("cqr_3d: requires a cubic grid (d == c)");
  if (a.pr != a.grid.d || a.pc != a.grid.c)
    throw std::invalid_argument("input must be cyclic over the d×c slices");
}

}  // namespace

QrResult cqr_1d(const DistMatrix& a, CostLedger& ledger) {
  validate_1d(a);
  return with_breakdown_hint([&] {
    QrResult res;
    std::vector<std::string> warnings;
    Pass p = panel_pass_1d(a, ledger, warnings);
    res = finish_single(a, std::move(p), ledger);
    res.warnings = std::move(warnings);
    return res;
  });
}

QrResult cqr2_1d(const DistMatrix& a, CostLedger& ledger) {
  validate_1d(a);
  return with_breakdown_hint([&] {
    return finish_double(
        a, ledger,
        [](const DistMatrix& in, CostLedger& led, std::vector<std::string>& warn) {
          return panel_pass_1d(in, led, warn);
        },
        /*product_is_local=*/true);
  });
}

QrResult cqr_3d(const DistMatrix& a, CostLedger& ledger, QrVariant variant, int n_o) {
  validate_tall(a, /*cubic=*/true);
  return with_breakdown_hint([&] {
    QrResult res;
    Pass p = cubic_pass(a, variant, n_o, ledger);
    res = finish_single(a, std::move(p), ledger);
    return res;
  });
}

QrResult cqr2_3d(const DistMatrix& a, CostLedger& ledger, QrVariant variant, int n_o) {
  validate_tall(a, /*cubic=*/true);
  return with_breakdown_hint([&] {
    return finish_double(
        a, ledger,
        [&](const DistMatrix& in, CostLedger& led, std::vector<std::string>&) {
          return cubic_pass(in, variant, n_o, led);
        },
        /*product_is_local=*/false);
  });
}

QrResult cacqr(const DistMatrix& a, CostLedger& ledger, QrVariant variant, int n_o) {
  validate_tall(a, /*cubic=*/false);
  return with_breakdown_hint([&] {
    QrResult res;
    Pass p = tunable_pass(a, variant, n_o, ledger);
    res = finish_single(a, std::move(p), ledger);
    return res;
  });
}

QrResult cacqr2(const DistMatrix& a, CostLedger& ledger, QrVariant variant, int n_o) {
  validate_tall(a, /*cubic=*/false);
  return with_breakdown_hint([&] {
    return finish_double(
        a, ledger,
        [&](const DistMatrix& in, CostLedger& led, std::vector<std::string>&) {
          return tunable_pass(in, variant, n_o, led);
        },
        /*product_is_local=*/false);
  });
}

SeqQr seq_cqr(const DenseMatrix& a, CostLedger& ledger) {
  return with_breakdown_hint([&] {
    const long long m = a.rows, n = a.cols;
    DenseMatrix gram = kernels::syrk(a);
    ledger.charge_flops("syrk", Rat(m * n * n));
    CholInvResult ci = cholinv_padded(gram, nullptr);
    ledger.charge_flops("cholinv", gamma_cholinv_step(n));
    DenseMatrix q = kernels::trmm_right_upper(a, kernels::transpose(ci.y));
    ledger.charge_flops("q multiply", Rat(m * n * n));
    return SeqQr{std::move(q), kernels::transpose(ci.l)};
  });
}

SeqQr seq_cqr2(const DenseMatrix& a, CostLedger& ledger) {
  const long long n = a.cols;
  SeqQr p1 = seq_cqr(a, ledger);
  SeqQr p2 = seq_cqr(p1.q, ledger);
  DenseMatrix r = kernels::mm(p2.r, p1.r);
  ledger.charge_flops("r product", Rat(n * n * n, 3));
  return SeqQr{std::move(p2.q), std::move(r)};
}

}  // namespace gridqr
