#include "gridqr/kernels.hpp"

#include <stdexcept>

namespace gridqr::kernels {

namespace {
// OpenMP kicks in above this many output elements. The parallel loops are
// over independent output rows with a fixed inner summation order, so the
// result is bitwise identical to the serial reference at any thread count.
constexpr long long kOmpThreshold = 16 * 1024;

void check_inner(int an, int bm, const char* who) {
  if (an != bm) throw std::invalid_argument(std::string(who) + ": inner dimension mismatch");
}
}  // namespace

DenseMatrix mm(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc) {
  check_inner(a.cols, b.rows, "mm");
  DenseMatrix c(a.rows, b.cols);
  const long long work = static_cast<long long>(a.rows) * b.cols * a.cols;
#pragma omp parallel for schedule(static) if (work > kOmpThreshold)
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  if (fc) fc->add_mm(a.rows, a.cols, b.cols);
  return c;
}

DenseMatrix mm_tn(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc) {
  check_inner(a.rows, b.rows, "mm_tn");
  DenseMatrix c(a.cols, b.cols);
  const long long work = static_cast<long long>(a.cols) * b.cols * a.rows;
#pragma omp parallel for schedule(static) if (work > kOmpThreshold)
  for (int i = 0; i < a.cols; ++i) {
    for (int k = 0; k < a.rows; ++k) {
      const double aki = a.at(k, i);
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aki * b.at(k, j);
    }
  }
  if (fc) fc->add_mm(a.cols, a.rows, b.cols);
  return c;
}

DenseMatrix mm_scaled(double alpha, const DenseMatrix& a, const DenseMatrix& b,
                      FlopCounter* fc) {
  DenseMatrix c = mm(a, b, fc);
  for (double& v : c.data) v *= alpha;
  return c;
}

DenseMatrix syrk(const DenseMatrix& a, FlopCounter* fc) {
  DenseMatrix c(a.cols, a.cols);
  const long long work = static_cast<long long>(a.cols) * a.cols * a.rows;
#pragma omp parallel for schedule(static) if (work > kOmpThreshold)
  for (int i = 0; i < a.cols; ++i) {
    for (int j = i; j < a.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.rows; ++k) s += a.at(k, i) * a.at(k, j);
      c.at(i, j) = s;
      c.at(j, i) = s;
    }
  }
  if (fc) fc->add_syrk(a.rows, a.cols);
  return c;
}

DenseMatrix syrk_nt(const DenseMatrix& a, FlopCounter* fc) {
  DenseMatrix c(a.rows, a.rows);
  const long long work = static_cast<long long>(a.rows) * a.rows * a.cols;
#pragma omp parallel for schedule(static) if (work > kOmpThreshold)
  for (int i = 0; i < a.rows; ++i) {
    for (int j = i; j < a.rows; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += a.at(i, k) * a.at(j, k);
      c.at(i, j) = s;
      c.at(j, i) = s;
    }
  }
  if (fc) fc->add_syrk(a.cols, a.rows);
  return c;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc) {
  if (!a.same_shape(b)) throw std::invalid_argument("sub: shape mismatch");
  DenseMatrix c(a.rows, a.cols);
  for (size_t i = 0; i < a.data.size(); ++i) c.data[i] = a.data[i] - b.data[i];
  if (fc) fc->add_axpy(a.rows, a.cols);
  return c;
}

DenseMatrix trmm_right_upper(const DenseMatrix& a, const DenseMatrix& u, FlopCounter* fc) {
  check_inner(a.cols, u.rows, "trmm_right_upper");
  if (u.rows != u.cols) throw std::invalid_argument("trmm_right_upper: U not square");
  DenseMatrix c(a.rows, u.cols);
  const long long work = static_cast<long long>(a.rows) * u.cols * u.rows / 2;
#pragma omp parallel for schedule(static) if (work > kOmpThreshold)
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < u.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k <= j; ++k) s += a.at(i, k) * u.at(k, j);
      c.at(i, j) = s;
    }
  }
  if (fc) fc->add_trmm(a.rows, u.cols);
  return c;
}

DenseMatrix trmm_right_lower(const DenseMatrix& a, const DenseMatrix& l, FlopCounter* fc) {
  check_inner(a.cols, l.rows, "trmm_right_lower");
  if (l.rows != l.cols) throw std::invalid_argument("trmm_right_lower: L not square");
  DenseMatrix c(a.rows, l.cols);
#pragma omp parallel for schedule(static) if (static_cast<long long>(a.rows) * l.cols * l.rows / 2 > kOmpThreshold)
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < l.cols; ++j) {
      double s = 0.0;
      for (int k = j; k < l.rows; ++k) s += a.at(i, k) * l.at(k, j);
      c.at(i, j) = s;
    }
  }
  if (fc) fc->add_trmm(a.rows, l.cols);
  return c;
}

DenseMatrix trmm_left_lower(double alpha, const DenseMatrix& l, const DenseMatrix& a,
                            FlopCounter* fc) {
  check_inner(l.cols, a.rows, "trmm_left_lower");
  if (l.rows != l.cols) throw std::invalid_argument("trmm_left_lower: L not square");
  DenseMatrix c(l.rows, a.cols);
#pragma omp parallel for schedule(static) if (static_cast<long long>(l.rows) * a.cols * l.cols / 2 > kOmpThreshold)
  for (int i = 0; i < l.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k <= i; ++k) s += l.at(i, k) * a.at(k, j);
      c.at(i, j) = alpha * s;
    }
  }
  if (fc) fc->add_trmm(a.cols, l.rows);
  return c;
}

DenseMatrix trsm_right_upper(const DenseMatrix& b, const DenseMatrix& r, FlopCounter* fc) {
  check_inner(b.cols, r.rows, "trsm_right_upper");
  if (r.rows != r.cols) throw std::invalid_argument("trsm_right_upper: R not square");
  for (int j = 0; j < r.cols; ++j)
    if (r.at(j, j) == 0.0) throw std::domain_error("trsm_right_upper: zero diagonal entry");
  DenseMatrix x(b.rows, b.cols);
  // Row-independent forward substitution: x_j = (b_j - sum_{k<j} x_k r_kj) / r_jj.
#pragma omp parallel for schedule(static) if (static_cast<long long>(b.rows) * r.cols * r.rows / 2 > kOmpThreshold)
  for (int i = 0; i < b.rows; ++i) {
    for (int j = 0; j < r.cols; ++j) {
      double s = b.at(i, j);
      for (int k = 0; k < j; ++k) s -= x.at(i, k) * r.at(k, j);
      x.at(i, j) = s / r.at(j, j);
    }
  }
  if (fc) fc->add_trmm(b.rows, r.cols);
  return x;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

namespace serial_ref {

DenseMatrix mm(const DenseMatrix& a, const DenseMatrix& b) {
  check_inner(a.cols, b.rows, "serial_ref::mm");
  DenseMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

DenseMatrix mm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  check_inner(a.rows, b.rows, "serial_ref::mm_tn");
  DenseMatrix c(a.cols, b.cols);
  for (int i = 0; i < a.cols; ++i)
    for (int k = 0; k < a.rows; ++k) {
      const double aki = a.at(k, i);
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aki * b.at(k, j);
    }
  return c;
}

DenseMatrix syrk(const DenseMatrix& a) {
  DenseMatrix c(a.cols, a.cols);
  for (int i = 0; i < a.cols; ++i)
    for (int j = i; j < a.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.rows; ++k) s += a.at(k, i) * a.at(k, j);
      c.at(i, j) = s;
      c.at(j, i) = s;
    }
  return c;
}

DenseMatrix trmm_right_upper(const DenseMatrix& a, const DenseMatrix& u) {
  check_inner(a.cols, u.rows, "serial_ref::trmm_right_upper");
  DenseMatrix c(a.rows, u.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < u.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k <= j; ++k) s += a.at(i, k) * u.at(k, j);
      c.at(i, j) = s;
    }
  return c;
}

}  // namespace serial_ref
}  // namespace gridqr::kernels
