#include "gridqr/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "gridqr/kernels.hpp"

namespace gridqr {

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return std::sqrt(s);
}

double frobenius_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("frobenius_diff: shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double rel_frobenius_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double nb = frobenius_norm(b);
  double d = frobenius_diff(a, b);
  if (nb == 0.0) return d == 0.0 ? 0.0 : INFINITY;
  return d / nb;
}

double orthogonality_error(const DenseMatrix& q) {
  DenseMatrix g = kernels::mm_tn(q, q);
  return frobenius_diff(g, DenseMatrix::identity(q.cols));
}

}  // namespace gridqr
