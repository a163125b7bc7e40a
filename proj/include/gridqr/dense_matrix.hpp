#pragma once

#include <cstddef>
#include <vector>

namespace gridqr {

/// Row-major dense matrix of doubles. The unit of all local computation.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  size_t size() const { return data.size(); }
  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

  static DenseMatrix zero(int r, int c) { return DenseMatrix(r, c); }
  static DenseMatrix identity(int n) {
    DenseMatrix I(n, n);
    for (int i = 0; i < n; ++i) I.at(i, i) = 1.0;
    return I;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
  }
};

double frobenius_norm(const DenseMatrix& a);
/// ||a - b||_F; shapes must agree.
double frobenius_diff(const DenseMatrix& a, const DenseMatrix& b);
/// ||a - b||_F / ||b||_F (0/0 -> 0).
double rel_frobenius_diff(const DenseMatrix& a, const DenseMatrix& b);
/// ||AᵀA - I||_F, the orthogonality error of a column-orthonormal candidate.
double orthogonality_error(const DenseMatrix& q);

}  // namespace gridqr
