#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gridqr/dist_matrix.hpp"
#include "gridqr/kernels.hpp"
#include "gridqr/matrix_io.hpp"
#include "gridqr/qr_oracle.hpp"

using namespace gridqr;

namespace {

DenseMatrix counting(int r, int c) {
  DenseMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = 100.0 * i + j;
  return m;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("cyclic ownership") {
  GridShape g = build_grid(2, 2);
  DenseMatrix a = counting(4, 4);
  DistMatrix d = scatter_cyclic(a, g, 2, 2);
  // rank (x=0,y=0) owns rows {0,2} × cols {0,2}
  const DenseMatrix& b = d.block({0, 0, 0});
  REQUIRE(b.rows == 2);
  REQUIRE(b.cols == 2);
  CHECK(b.at(0, 0) == a.at(0, 0));
  CHECK(b.at(0, 1) == a.at(0, 2));
  CHECK(b.at(1, 0) == a.at(2, 0));
  CHECK(b.at(1, 1) == a.at(2, 2));
  // depth replication
  CHECK(d.block({0, 0, 1}) == b);
}

TEST_CASE("scatter/gather round-trips bitwise") {
  GridShape g1 = build_grid(1, 1);
  DenseMatrix a = counting(3, 5);
  DistMatrix d1 = scatter_cyclic(a, g1, 1, 1);
  CHECK(d1.block({0, 0, 0}) == a);  // 1×1 slice holds the whole matrix
  CHECK(gather(d1) == a);

  GridShape g = build_grid(2, 8);
  DenseMatrix b = counting(8, 4);
  DistMatrix d = scatter_cyclic(b, g, 4, 2);
  CHECK(gather(d) == b);

  DenseMatrix z(6, 6);
  CHECK(gather(scatter_cyclic(z, g, 2, 2)) == z);

  // 20 random cases, bitwise
  for (int t = 0; t < 20; ++t) {
    NormalRng rng(500 + t);
    int pr = (t % 2) ? 4 : 2, pc = (t % 3) ? 2 : 1;
    DenseMatrix r = rng.matrix(pr * (1 + t % 5), pc * (1 + t % 7));
    CHECK(gather(scatter_cyclic(r, g, pr, pc)) == r);
  }

  CHECK_THROWS_AS(scatter_cyclic(counting(5, 4), g, 4, 2), std::invalid_argument);
}

TEST_CASE("gather detects a corrupted depth copy") {
  GridShape g = build_grid(2, 2);
  DistMatrix d = scatter_cyclic(counting(4, 4), g, 2, 2);
  d.block({0, 0, 1}).at(0, 0) += 1.0;  // violate replication on purpose
  CHECK_THROWS_AS(gather(d), std::runtime_error);
}

TEST_CASE("subview is index arithmetic on the cyclic blocks") {
  GridShape g = build_grid(2, 2);
  DenseMatrix a = counting(4, 4);
  DistMatrix d = scatter_cyclic(a, g, 2, 2);
  DistMatrix a11 = subview(d, Quadrant::A11);
  // each rank keeps its local 1×1 corner
  for (int id = 0; id < g.p(); ++id) {
    RankCoord r = coord_of(g, id);
    REQUIRE(a11.block(r).rows == 1);
    CHECK(a11.block(r).at(0, 0) == d.block(r).at(0, 0));
  }

  // subview commutes with gather, every quadrant
  DenseMatrix big = counting(8, 8);
  DistMatrix db = scatter_cyclic(big, g, 2, 2);
  for (Quadrant q : {Quadrant::A11, Quadrant::A21, Quadrant::A12, Quadrant::A22}) {
    DenseMatrix gathered_view = gather(subview(db, q));
    int i0 = (q == Quadrant::A21 || q == Quadrant::A22) ? 4 : 0;
    int j0 = (q == Quadrant::A12 || q == Quadrant::A22) ? 4 : 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(gathered_view.at(i, j) == big.at(i0 + i, j0 + j));
  }

  // A22 of diag(1,2,3,4) is diag(3,4)
  DenseMatrix diag(4, 4);
  for (int i = 0; i < 4; ++i) diag.at(i, i) = 1.0 + i;
  DenseMatrix a22 = gather(subview(scatter_cyclic(diag, g, 2, 2), Quadrant::A22));
  CHECK(a22.at(0, 0) == 3.0);
  CHECK(a22.at(1, 1) == 4.0);
  CHECK(a22.at(0, 1) == 0.0);

  // closed under composition: A22 of A22 equals the global quarter view
  DistMatrix q22 = subview(subview(db, Quadrant::A22), Quadrant::A22);
  DenseMatrix gq = gather(q22);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(gq.at(i, j) == big.at(6 + i, 6 + j));

  CHECK_THROWS_AS(subview(scatter_cyclic(counting(6, 6), g, 2, 2), Quadrant::A11),
                  std::invalid_argument);  // odd quadrant (6/2 = 3 not divisible)
}

TEST_CASE("set_quadrant is the inverse of subview") {
  GridShape g = build_grid(2, 2);
  DenseMatrix big = counting(8, 8);
  DistMatrix db = scatter_cyclic(big, g, 2, 2);
  DistMatrix dst = scatter_cyclic(DenseMatrix(8, 8), g, 2, 2);
  for (Quadrant q : {Quadrant::A11, Quadrant::A21, Quadrant::A12, Quadrant::A22})
    set_quadrant(dst, q, subview(db, q));
  CHECK(gather(dst) == big);
}

TEST_CASE("distributed transpose") {
  GridShape g = build_grid(2, 2);
  CostLedger led;

  // a symmetric matrix is a fixed point
  DenseMatrix s(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s.at(i, j) = 1.0 + i + j;
  DistMatrix ds = scatter_cyclic(s, g, 2, 2);
  CHECK(gather(local_transpose_exchange(ds, led)) == s);

  // gather ∘ transpose = transpose ∘ gather
  DenseMatrix a = counting(8, 8);
  DistMatrix da = scatter_cyclic(a, g, 2, 2);
  CostLedger led2;
  DistMatrix dt = local_transpose_exchange(da, led2);
  CHECK(gather(dt) == kernels::transpose(a));
  check_replication(dt);
  CHECK(led2.total().alpha == Rat(1));        // δ(4)·α
  CHECK(led2.total().beta == Rat(16));        // 64/4 words per rank

  // single-copy arrangement: diagonal ranks only, zero charge
  DistMatrix d1 = scatter_cyclic(a, g, 1, 1);
  CostLedger led3;
  DistMatrix dt1 = local_transpose_exchange(d1, led3);
  CHECK(gather(dt1) == kernels::transpose(a));
  CHECK(led3.total() == CostTriple{});

  // packed charge for triangular matrices
  DenseMatrix lo(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) lo.at(i, j) = 1.0 + i + j;
  DistMatrix dlo = scatter_cyclic(lo, g, 2, 2, PadMode::Forbid, MatStructure::LowerTri);
  CostLedger led4;
  DistMatrix dup = local_transpose_exchange(dlo, led4);
  CHECK(dup.structure == MatStructure::UpperTri);
  CHECK(led4.total().beta == tri_words(4) / Rat(4));

  CHECK_THROWS_AS(local_transpose_exchange(scatter_cyclic(counting(8, 4), g, 2, 2), led),
                  std::invalid_argument);  // non-square matrix
  GridShape gr = build_grid(2, 8);
  CHECK_THROWS_AS(
      local_transpose_exchange(scatter_cyclic(counting(8, 8), gr, 8, 2), led),
      std::invalid_argument);  // non-square arrangement
}

TEST_CASE("a block scattered over a slice reassembles from an allgather") {
  GridShape g = build_grid(2, 2);
  DenseMatrix a = counting(4, 4);
  DistMatrix d = scatter_cyclic(a, g, 2, 2);
  Communicator slice = subcomm(g, {0, 0, 0}, CommKind::Slice);
  CostLedger led;
  auto parts = collectives::allgather(d.blocks, slice, led);
  // reassemble by the cyclic rule from the members' coordinates
  DenseMatrix out(4, 4);
  for (int k = 0; k < slice.size(); ++k) {
    const RankCoord& r = slice.members[k];
    for (int i = 0; i < parts[k].rows; ++i)
      for (int j = 0; j < parts[k].cols; ++j)
        out.at(i * 2 + r.y, j * 2 + r.x) = parts[k].at(i, j);
  }
  CHECK(out == a);
  CHECK(led.total().alpha == Rat(2));  // log2 of the slice size
  CHECK(led.total().beta == Rat(16));  // all 16 words gathered
}

TEST_CASE("padding: zero rows and unit-extension columns nest the QR exactly") {
  GridShape g = build_grid(2, 8);
  DenseMatrix a = counting(7, 3);
  DistMatrix d = scatter_cyclic(a, g, 8, 2, PadMode::ZeroRowsUnitCols);
  CHECK(d.grows % 8 == 0);
  CHECK(d.gcols % 2 == 0);
  CHECK(gather(d) == a);  // stripping recovers the original bitwise

  // the padded Gram is block diagonal: original columns ⟂ extension columns
  DenseMatrix ap = gather_padded(d);
  DenseMatrix gram = kernels::syrk(ap);
  for (int j = a.cols; j < ap.cols; ++j) {
    for (int i = 0; i < a.cols; ++i) CHECK(gram.at(i, j) == 0.0);
    CHECK(gram.at(j, j) == 1.0);
  }
}

TEST_CASE("padding: identity extension for square SPD intermediates") {
  GridShape g = build_grid(2, 2);
  DenseMatrix spd(3, 3);
  for (int i = 0; i < 3; ++i) spd.at(i, i) = 4.0 + i;
  DistMatrix d = scatter_cyclic(spd, g, 2, 2, PadMode::IdentityExtend);
  CHECK(d.grows == 4);
  DenseMatrix padded = gather_padded(d);
  CHECK(padded.at(3, 3) == 1.0);
  CHECK(gather(d) == spd);
}

TEST_CASE("matrix file io round-trips bitwise") {
  NormalRng rng(77);
  for (int t = 0; t < 20; ++t) {
    DenseMatrix a = rng.matrix(1 + t % 7, 1 + t % 5);
    a.data[0] = 1e-310;  // subnormal survives the binary format
    std::string bin = temp_path("gridqr_io_test.gqr1");
    write_gqr1(bin, a);
    CHECK(read_gqr1(bin) == a);
    std::string csv = temp_path("gridqr_io_test.csv");
    write_csv(csv, a);
    CHECK(read_csv(csv) == a);
    std::remove(bin.c_str());
    std::remove(csv.c_str());
  }

  // extension dispatch
  DenseMatrix a = rng.matrix(3, 3);
  std::string csv = temp_path("gridqr_io_dispatch.csv");
  write_matrix(csv, a);
  CHECK(read_matrix(csv) == a);
  std::remove(csv.c_str());

  // bad magic
  std::string bad = temp_path("gridqr_io_bad.gqr1");
  {
    std::ofstream f(bad, std::ios::binary);
    f << "NOPE0000000000000000";
  }
  CHECK_THROWS_AS(read_gqr1(bad), std::runtime_error);
  std::remove(bad.c_str());
}
