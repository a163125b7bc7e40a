// Benchmarks the OpenMP kernels against the serial reference implementations
// and checks that both produce bitwise-identical results.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gridqr/kernels.hpp"
#include "gridqr/qr_oracle.hpp"

using namespace gridqr;

namespace {

double time_ms(const std::function<DenseMatrix()>& fn, DenseMatrix& out, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    out = fn();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, int size, const std::function<DenseMatrix()>& par,
         const std::function<DenseMatrix()>& ser) {
  DenseMatrix a, b;
  const int reps = size <= 512 ? 5 : 3;
  double tp = time_ms(par, a, reps);
  double ts = time_ms(ser, b, reps);
  const char* same = (a == b) ? "yes" : "NO";
  std::printf("%-18s %6d  %10.2f  %10.2f  %7.2fx  %s\n", name, size, ts, tp, ts / tp,
              same);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled in this build\n");
#endif
  std::printf("%-18s %6s  %10s  %10s  %8s  %s\n", "kernel", "size", "serial(ms)",
              "omp(ms)", "speedup", "bitwise");

  NormalRng rng(42);
  for (int n : {128, 256, 512}) {
    DenseMatrix a = rng.matrix(n, n);
    DenseMatrix b = rng.matrix(n, n);
    row("mm", n, [&] { return kernels::mm(a, b); },
        [&] { return kernels::serial_ref::mm(a, b); });
  }
  for (int n : {128, 256}) {
    DenseMatrix a = rng.matrix(4 * n, n);
    row("syrk (tall)", n, [&] { return kernels::syrk(a); },
        [&] { return kernels::serial_ref::syrk(a); });
  }
  for (int n : {128, 256, 512}) {
    DenseMatrix a = rng.matrix(n, n);
    DenseMatrix u(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) u.at(i, j) = 1.0 + (i == j ? n : 0);
    row("trmm_right_upper", n, [&] { return kernels::trmm_right_upper(a, u); },
        [&] { return kernels::serial_ref::trmm_right_upper(a, u); });
  }
  return 0;
}
