#include "gridqr/qr_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gridqr/kernels.hpp"

namespace gridqr {

QrFactors householder_qr(const DenseMatrix& a) {
  const int m = a.rows, n = a.cols;
  if (m < n) throw std::invalid_argument("householder_qr: requires m >= n");
  DenseMatrix work = a;
  std::vector<std::vector<double>> vs;  // reflector vectors, vs[k] has length m-k
  vs.reserve(n);

  for (int k = 0; k < n; ++k) {
    double norm = 0.0;
    for (int i = k; i < m; ++i) norm += work.at(i, k) * work.at(i, k);
    norm = std::sqrt(norm);
    std::vector<double> v(m - k, 0.0);
    double beta = 0.0;
    if (norm > 0.0) {
      double alpha = work.at(k, k) >= 0.0 ? -norm : norm;
      v[0] = work.at(k, k) - alpha;
      for (int i = k + 1; i < m; ++i) v[i - k] = work.at(i, k);
      double vnorm2 = 0.0;
      for (double x : v) vnorm2 += x * x;
      if (vnorm2 > 0.0) {
        beta = 2.0 / vnorm2;
        for (int j = k; j < n; ++j) {
          double s = 0.0;
          for (int i = k; i < m; ++i) s += v[i - k] * work.at(i, j);
          s *= beta;
          for (int i = k; i < m; ++i) work.at(i, j) -= s * v[i - k];
        }
      }
      work.at(k, k) = alpha;
      for (int i = k + 1; i < m; ++i) work.at(i, k) = 0.0;
    }
    // store v scaled so the reflector is I - beta v vᵀ
    if (beta == 0.0) v.assign(m - k, 0.0);
    vs.push_back(std::move(v));
    if (beta != 0.0) {
      double s = std::sqrt(beta);
      for (double& x : vs.back()) x *= s;
    }
  }

  QrFactors f;
  f.r = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) f.r.at(i, j) = work.at(i, j);

  // Q = H_0 ··· H_{n-1} applied to the first n columns of I.
  f.q = DenseMatrix(m, n);
  for (int j = 0; j < n; ++j) f.q.at(j, j) = 1.0;
  for (int k = n - 1; k >= 0; --k) {
    const auto& v = vs[k];
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < m; ++i) s += v[i - k] * f.q.at(i, j);
      if (s == 0.0) continue;
      for (int i = k; i < m; ++i) f.q.at(i, j) -= s * v[i - k];
    }
  }
  return f;
}

void sign_normalize(QrFactors& f) {
  const int n = f.r.rows;
  for (int j = 0; j < n; ++j) {
    if (f.r.at(j, j) < 0.0) {
      for (int k = j; k < n; ++k) f.r.at(j, k) = -f.r.at(j, k);
      for (int i = 0; i < f.q.rows; ++i) f.q.at(i, j) = -f.q.at(i, j);
    }
  }
}

double min_abs_diag(const DenseMatrix& r) {
  double mn = INFINITY;
  for (int j = 0; j < std::min(r.rows, r.cols); ++j) mn = std::min(mn, std::fabs(r.at(j, j)));
  return mn;
}

double NormalRng::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box–Muller on uniforms in (0,1].
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u1 = 0.0;
  do { u1 = 1.0 - unif(eng_); } while (u1 <= 0.0);
  double u2 = 1.0 - unif(eng_);
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * M_PI * u2;
  spare_ = r * std::sin(th);
  have_spare_ = true;
  return r * std::cos(th);
}

DenseMatrix NormalRng::matrix(int rows, int cols) {
  DenseMatrix a(rows, cols);
  for (double& v : a.data) v = next();
  return a;
}

DenseMatrix gen_test_matrix(int m, int n, double cond, uint64_t seed) {
  if (m < n) throw std::invalid_argument("gen_test_matrix: requires m >= n");
  if (cond < 1.0) throw std::invalid_argument("gen_test_matrix: requires cond >= 1");
  NormalRng rng(seed);
  QrFactors fu = householder_qr(rng.matrix(m, n));
  QrFactors fv = householder_qr(rng.matrix(n, n));
  // A = U·diag(σ)·Vᵀ, σ_j from 1 down to 1/cond geometrically.
  DenseMatrix us = fu.q;
  for (int j = 0; j < n; ++j) {
    double sigma = n == 1 ? 1.0 : std::pow(cond, -static_cast<double>(j) / (n - 1));
    for (int i = 0; i < m; ++i) us.at(i, j) *= sigma;
  }
  return kernels::mm(us, kernels::transpose(fv.q));
}

std::vector<double> singular_values(const DenseMatrix& a) {
  // One-sided Jacobi: rotate column pairs until all are mutually orthogonal,
  // then the singular values are the column norms. High relative accuracy.
  DenseMatrix w = a;
  const int m = w.rows, n = w.cols;
  const double tol = 1e-14;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += w.at(i, p) * w.at(i, p);
          aqq += w.at(i, q) * w.at(i, q);
          apq += w.at(i, p) * w.at(i, q);
        }
        if (std::fabs(apq) <= tol * std::sqrt(app * aqq)) continue;
        rotated = true;
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (int i = 0; i < m; ++i) {
          double wp = w.at(i, p), wq = w.at(i, q);
          w.at(i, p) = c * wp - s * wq;
          w.at(i, q) = s * wp + c * wq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += w.at(i, j) * w.at(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

}  // namespace gridqr
