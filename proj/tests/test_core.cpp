#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "gridqr/dense_matrix.hpp"
#include "gridqr/factor.hpp"
#include "gridqr/kernels.hpp"
#include "gridqr/qr_oracle.hpp"
#include "gridqr/rational.hpp"

using namespace gridqr;

namespace {

DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m(static_cast<int>(rows.size()),
                static_cast<int>(rows.begin()->size()));
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m.at(i, j++) = v;
    ++i;
  }
  return m;
}

DenseMatrix random_spd(int n, uint64_t seed, double shift) {
  NormalRng rng(seed);
  DenseMatrix m = rng.matrix(n, n);
  DenseMatrix g = kernels::syrk(m);
  for (int i = 0; i < n; ++i) g.at(i, i) += shift;
  return g;
}

// Independent recurrence for the as-executed cholinv flop count:
//   T(1) = 2/3 + 1,  T(n) = 2T(n/2) + 4·(n/2)³ + (n/2)².
Rat cholinv_executed_flops(long long n) {
  if (n == 1) return Rat(2, 3) + Rat(1);
  long long h = n / 2;
  return Rat(2) * cholinv_executed_flops(h) + Rat(4 * h * h * h) + Rat(h * h);
}

}  // namespace

TEST_CASE("rational arithmetic is exact and normalized") {
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(2, 3) + Rat(1, 6) == Rat(5, 6));
  CHECK(Rat(1, 3) * Rat(3, 7) == Rat(1, 7));
  CHECK(Rat(-4, -8) == Rat(1, 2));
  CHECK(Rat(1, 2) < Rat(2, 3));
  CHECK(Rat(7).is_integer());
  CHECK(Rat(22528, 3).str() == "22528/3");
  CHECK_THROWS_AS(Rat(1, 0), std::invalid_argument);
  CHECK(doctest::Approx(Rat(1, 3).to_double()) == 1.0 / 3.0);
}

TEST_CASE("flop counter matches the sequential cost formulas exactly") {
  FlopCounter fc;
  fc.add_mm(2, 3, 2);
  CHECK(fc.flops == Rat(24));  // 2mnk
  fc = {};
  fc.add_syrk(5, 3);
  CHECK(fc.flops == Rat(45));  // mn²
  fc = {};
  fc.add_chol(4);
  CHECK(fc.flops == Rat(128, 3));  // 2n³/3
  fc = {};
  fc.add_axpy(3, 7);
  CHECK(fc.flops == Rat(21));  // mn
}

TEST_CASE("mm basics") {
  DenseMatrix a = from_rows({{1, 2}, {3, 4}});
  DenseMatrix b = from_rows({{5}, {6}});
  DenseMatrix c = kernels::mm(a, b);
  CHECK(c.at(0, 0) == 17);
  CHECK(c.at(1, 0) == 39);

  NormalRng rng(1);
  DenseMatrix r = rng.matrix(6, 4);
  CHECK(kernels::mm(DenseMatrix::identity(6), r) == r);
  CHECK_THROWS_AS(kernels::mm(a, DenseMatrix(3, 3)), std::invalid_argument);

  FlopCounter fc;
  kernels::mm(DenseMatrix(2, 3), DenseMatrix(3, 2), &fc);
  CHECK(fc.flops == Rat(24));
}

TEST_CASE("syrk") {
  DenseMatrix a = from_rows({{3}, {4}});
  DenseMatrix g = kernels::syrk(a);
  CHECK(g.at(0, 0) == 25);

  // orthonormal columns give the identity
  QrFactors f = householder_qr(NormalRng(3).matrix(16, 5));
  DenseMatrix gg = kernels::syrk(f.q);
  CHECK(frobenius_diff(gg, DenseMatrix::identity(5)) < 1e-14);

  // exact symmetry by construction
  DenseMatrix s = kernels::syrk(NormalRng(4).matrix(9, 7));
  CHECK(frobenius_diff(s, kernels::transpose(s)) == 0.0);
}

TEST_CASE("openmp kernels are bitwise identical to the serial reference") {
  NormalRng rng(7);
  DenseMatrix a = rng.matrix(150, 130);
  DenseMatrix b = rng.matrix(130, 140);
  CHECK(kernels::mm(a, b) == kernels::serial_ref::mm(a, b));
  CHECK(kernels::syrk(a) == kernels::serial_ref::syrk(a));
  DenseMatrix u(130, 130);
  NormalRng rng2(8);
  for (int i = 0; i < 130; ++i)
    for (int j = i; j < 130; ++j) u.at(i, j) = rng2.next() + (i == j ? 200.0 : 0.0);
  CHECK(kernels::trmm_right_upper(a, u) == kernels::serial_ref::trmm_right_upper(a, u));
  CHECK(kernels::mm_tn(a, a) == kernels::serial_ref::mm_tn(a, a));
}

TEST_CASE("cholesky") {
  DenseMatrix d49 = from_rows({{4, 0}, {0, 9}});
  DenseMatrix l = chol(d49);
  CHECK(l.at(0, 0) == 2);
  CHECK(l.at(1, 1) == 3);

  DenseMatrix a = from_rows({{4, 2}, {2, 5}});
  l = chol(a);
  CHECK(l.at(0, 0) == 2);
  CHECK(l.at(1, 0) == 1);
  CHECK(l.at(0, 1) == 0);
  CHECK(l.at(1, 1) == 2);
  CHECK(frobenius_diff(kernels::mm(l, kernels::transpose(l)), a) == 0.0);

  FlopCounter fc;
  chol(random_spd(8, 2, 16.0), &fc);
  CHECK(fc.flops == Rat(2 * 8 * 8 * 8, 3));
}

TEST_CASE("cholesky breakdown on a near-singular Hilbert matrix") {
  const int n = 16;
  DenseMatrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h.at(i, j) = 1.0 / (i + j + 1);
  try {
    chol(h);
    FAIL("expected numerical_breakdown");
  } catch (const numerical_breakdown& e) {
    CHECK(e.pivot_index == 13);  // recorded for this kernel in double precision
    CHECK(e.pivot_value <= 0.0);
  }
}

TEST_CASE("cholinv") {
  DenseMatrix d49 = from_rows({{4, 0}, {0, 9}});
  CholInvResult f = cholinv(d49);
  CHECK(f.l.at(0, 0) == 2);
  CHECK(f.y.at(0, 0) == 0.5);
  CHECK(f.y.at(1, 1) == doctest::Approx(1.0 / 3.0));

  DenseMatrix a = from_rows({{4, 2}, {2, 5}});
  f = cholinv(a);
  CHECK(f.y.at(0, 0) == 0.5);
  CHECK(f.y.at(1, 0) == -0.25);
  CHECK(f.y.at(1, 1) == 0.5);
  CHECK(frobenius_diff(kernels::mm(f.l, f.y), DenseMatrix::identity(2)) < 1e-15);

  DenseMatrix spd = random_spd(16, 5, 16.0);
  f = cholinv(spd);
  CHECK(frobenius_diff(kernels::mm(f.l, f.y), DenseMatrix::identity(16)) <= 1e-13);

  CHECK_THROWS_AS(cholinv(random_spd(6, 6, 8.0)), std::invalid_argument);
}

TEST_CASE("chol and cholinv agree on the factor") {
  for (int n : {4, 16, 64}) {
    DenseMatrix a = random_spd(n, 100 + n, 2.0 * n);
    DenseMatrix l1 = chol(a);
    CholInvResult f = cholinv(a);
    CHECK(frobenius_diff(l1, f.l) <= 1e-12 * frobenius_norm(a));
  }
}

TEST_CASE("cholinv flops are counted as executed") {
  for (int n : {2, 8, 32}) {
    FlopCounter fc;
    cholinv(random_spd(n, 30 + n, 4.0 * n), &fc);
    CHECK(fc.flops == cholinv_executed_flops(n));
  }
  // leading order ≈ 2n³/3
  FlopCounter fc;
  cholinv(random_spd(64, 99, 256.0), &fc);
  CHECK(fc.flops.to_double() ==
        doctest::Approx(2.0 / 3.0 * 64 * 64 * 64).epsilon(0.05));
}

TEST_CASE("cholinv_padded strips the identity extension exactly") {
  DenseMatrix a = random_spd(5, 9, 10.0);
  CholInvResult f = cholinv_padded(a);
  CHECK(f.l.rows == 5);
  CHECK(frobenius_diff(kernels::mm(f.l, kernels::transpose(f.l)), a) <=
        1e-13 * frobenius_norm(a));
  CHECK(frobenius_diff(kernels::mm(f.l, f.y), DenseMatrix::identity(5)) <= 1e-13);
}

TEST_CASE("trsm_right_upper") {
  DenseMatrix r = from_rows({{2, 1}, {0, 3}});
  // X·R = R  =>  X = I
  DenseMatrix x = kernels::trsm_right_upper(r, r);
  CHECK(frobenius_diff(x, DenseMatrix::identity(2)) < 1e-15);

  DenseMatrix b = from_rows({{2, 3}});
  x = kernels::trsm_right_upper(b, r);
  CHECK(x.at(0, 0) == doctest::Approx(1.0));
  CHECK(x.at(0, 1) == doctest::Approx(2.0 / 3.0));

  NormalRng rng(11);
  DenseMatrix rb = rng.matrix(7, 5);
  DenseMatrix ru(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) ru.at(i, j) = rng.next() + (i == j ? 10.0 : 0.0);
  DenseMatrix xx = kernels::trsm_right_upper(rb, ru);
  CHECK(frobenius_diff(kernels::mm(xx, ru), rb) <= 1e-13 * frobenius_norm(rb));

  DenseMatrix sing = from_rows({{1, 1}, {0, 0}});
  CHECK_THROWS_AS(kernels::trsm_right_upper(b, sing), std::domain_error);
}

TEST_CASE("householder oracle") {
  QrFactors f = householder_qr(DenseMatrix::identity(5));
  sign_normalize(f);
  CHECK(frobenius_diff(f.q, DenseMatrix::identity(5)) < 1e-15);
  CHECK(frobenius_diff(f.r, DenseMatrix::identity(5)) < 1e-15);

  f = householder_qr(from_rows({{3}, {4}}));
  sign_normalize(f);
  CHECK(f.r.at(0, 0) == doctest::Approx(5.0));
  CHECK(f.q.at(0, 0) == doctest::Approx(0.6));
  CHECK(f.q.at(1, 0) == doctest::Approx(0.8));

  const double eps = std::numeric_limits<double>::epsilon();
  struct Case { int m, n, seed; };
  for (auto [m, n, seed] : {Case{64, 16, 21}, Case{256, 64, 22}, Case{100, 1, 23}}) {
    DenseMatrix a = NormalRng(seed).matrix(m, n);
    QrFactors g = householder_qr(a);
    sign_normalize(g);
    CHECK(orthogonality_error(g.q) <= 50.0 * n * eps);
    CHECK(frobenius_diff(kernels::mm(g.q, g.r), a) <=
          50.0 * m * eps * frobenius_norm(a));
    for (int j = 0; j < n; ++j) CHECK(g.r.at(j, j) >= 0.0);
  }
}

TEST_CASE("gen_test_matrix hits the requested condition number") {
  DenseMatrix a = gen_test_matrix(64, 8, 1e4, 7);
  auto sv = singular_values(a);
  double kappa = sv.front() / sv.back();
  CHECK(kappa >= 0.99e4);
  CHECK(kappa <= 1.01e4);

  // cond = 1: all singular values equal, the Gram is the identity up to fp
  DenseMatrix iso = gen_test_matrix(32, 6, 1.0, 9);
  CHECK(frobenius_diff(kernels::syrk(iso), DenseMatrix::identity(6)) < 1e-13);

  // determinism
  CHECK(gen_test_matrix(24, 5, 100.0, 42) == gen_test_matrix(24, 5, 100.0, 42));

  CHECK_THROWS_AS(gen_test_matrix(8, 4, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_test_matrix(4, 8, 10.0, 1), std::invalid_argument);
}

TEST_CASE("singular_values on a known diagonal") {
  DenseMatrix d(4, 3);
  d.at(0, 0) = 5.0;
  d.at(1, 1) = 2.0;
  d.at(2, 2) = 0.5;
  auto sv = singular_values(d);
  CHECK(sv[0] == doctest::Approx(5.0));
  CHECK(sv[1] == doctest::Approx(2.0));
  CHECK(sv[2] == doctest::Approx(0.5));
}
