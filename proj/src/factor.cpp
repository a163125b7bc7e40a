#include "gridqr/factor.hpp"

#include <bit>
#include <cmath>

namespace gridqr {

namespace {

DenseMatrix block(const DenseMatrix& a, int i0, int j0, int r, int c) {
  DenseMatrix b(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) b.at(i, j) = a.at(i0 + i, j0 + j);
  return b;
}

void put_block(DenseMatrix& a, int i0, int j0, const DenseMatrix& b) {
  for (int i = 0; i < b.rows; ++i)
    for (int j = 0; j < b.cols; ++j) a.at(i0 + i, j0 + j) = b.at(i, j);
}

}  // namespace

DenseMatrix chol(const DenseMatrix& a, FlopCounter* fc, int pivot_offset) {
  if (a.rows != a.cols) throw std::invalid_argument("chol: matrix not square");
  const int n = a.rows;
  DenseMatrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a.at(j, j);
    for (int k = 0; k < j; ++k) d -= l.at(j, k) * l.at(j, k);
    if (d <= 0.0)
      throw numerical_breakdown(pivot_offset + j, d,
                                "chol: nonpositive pivot " + std::to_string(d) +
                                    " at index " + std::to_string(pivot_offset + j));
    const double ljj = std::sqrt(d);
    l.at(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      l.at(i, j) = s / ljj;
    }
  }
  if (fc) fc->add_chol(n);
  return l;
}

CholInvResult cholinv(const DenseMatrix& a, FlopCounter* fc, int pivot_offset) {
  if (a.rows != a.cols) throw std::invalid_argument("cholinv: matrix not square");
  const int n = a.rows;
  if (n <= 0 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw std::invalid_argument("cholinv: dimension must be a power of two (pad first)");

  if (n == 1) {
    double d = a.at(0, 0);
    if (d <= 0.0)
      throw numerical_breakdown(pivot_offset, d,
                                "cholinv: nonpositive pivot " + std::to_string(d) +
                                    " at index " + std::to_string(pivot_offset));
    CholInvResult r{DenseMatrix(1, 1), DenseMatrix(1, 1)};
    r.l.at(0, 0) = std::sqrt(d);
    r.y.at(0, 0) = 1.0 / r.l.at(0, 0);
    if (fc) {
      fc->add_chol(1);
      fc->add(Rat(1));  // the reciprocal
    }
    return r;
  }

  const int h = n / 2;
  auto a11 = block(a, 0, 0, h, h);
  auto a21 = block(a, h, 0, h, h);
  auto a22 = block(a, h, h, h, h);

  CholInvResult f11 = cholinv(a11, fc, pivot_offset);
  // L21 = A21·Y11ᵀ; Y11 lower, so Y11ᵀ enters as an upper-triangular multiply.
  DenseMatrix l21 = kernels::trmm_right_upper(a21, kernels::transpose(f11.y), fc);
  DenseMatrix trail = kernels::sub(a22, kernels::syrk_nt(l21, fc), fc);
  CholInvResult f22 = cholinv(trail, fc, pivot_offset + h);
  DenseMatrix y21 = kernels::trmm_left_lower(-1.0, f22.y,
                                             kernels::trmm_right_lower(l21, f11.y, fc), fc);

  CholInvResult r{DenseMatrix(n, n), DenseMatrix(n, n)};
  put_block(r.l, 0, 0, f11.l);
  put_block(r.l, h, 0, l21);
  put_block(r.l, h, h, f22.l);
  put_block(r.y, 0, 0, f11.y);
  put_block(r.y, h, 0, y21);
  put_block(r.y, h, h, f22.y);
  return r;
}

CholInvResult cholinv_padded(const DenseMatrix& a, FlopCounter* fc, int pivot_offset) {
  const int n = a.rows;
  if (n > 0 && std::has_single_bit(static_cast<unsigned>(n)))
    return cholinv(a, fc, pivot_offset);
  int np = 1;
  while (np < n) np *= 2;
  DenseMatrix ap(np, np);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ap.at(i, j) = a.at(i, j);
  for (int i = n; i < np; ++i) ap.at(i, i) = 1.0;
  CholInvResult fp = cholinv(ap, fc, pivot_offset);
  CholInvResult r{block(fp.l, 0, 0, n, n), block(fp.y, 0, 0, n, n)};
  return r;
}

}  // namespace gridqr
