#include "gridqr/cost_model.hpp"

#include <stdexcept>

namespace gridqr {

std::string to_string(Alg a) {
  switch (a) {
    case Alg::Cqr1d: return "cqr-1d";
    case Alg::Cqr2_1d: return "cqr2-1d";
    case Alg::Cqr3d: return "cqr-3d";
    case Alg::Cqr2_3d: return "cqr2-3d";
    case Alg::Cacqr: return "cacqr";
    case Alg::Cacqr2: return "cacqr2";
  }
  return "?";
}

Alg alg_from_string(const std::string& s) {
  if (s == "cqr-1d") return Alg::Cqr1d;
  if (s == "cqr2-1d") return Alg::Cqr2_1d;
  if (s == "cqr-3d") return Alg::Cqr3d;
  if (s == "cqr2-3d") return Alg::Cqr2_3d;
  if (s == "cacqr") return Alg::Cacqr;
  if (s == "cacqr2") return Alg::Cacqr2;
  throw std::invalid_argument("unknown algorithm tag: " + s);
}

namespace {

Rat sq(long long v) { return Rat(v * v); }

/// One mm3d over a side-c cube, in per-rank words/flops.
CostTriple mm3d_charge(const Rat& wa, const Rat& wb, const Rat& wc,
                       const Rat& local_flops, int c) {
  CostTriple t = t_bcast(wa, c);
  t += t_bcast(wb, c);
  t += CostTriple{Rat(0), Rat(0), local_flops};
  t += t_allreduce(wc, c);
  return t;
}

CostTriple flops_only(const Rat& f) { return CostTriple{Rat(0), Rat(0), f}; }

/// The orthogonal-factor step: one multiply against the transposed full
/// inverse, or the blocked solve with two half-size inverted blocks (which
/// reuses the factorization's transposed subdiagonal block).
CostTriple analytic_q_step(long long m, long long n, int c, int d, bool split) {
  const long long cc = static_cast<long long>(c) * c;
  CostTriple t{};
  if (!split) {
    t += t_transpose(tri_words(n) / Rat(cc), cc);
    Rat wa = Rat(m, d) * Rat(n, c);
    t += mm3d_charge(wa, tri_words(n) / Rat(cc), wa,
                     Rat(m) * sq(n) / Rat(d * cc), c);
    return t;
  }
  const long long h = n / 2;
  Rat wa_half = Rat(m, d) * Rat(h, c);
  Rat trih = tri_words(h) / Rat(cc);
  Rat fullh = sq(h) / Rat(cc);
  t += t_transpose(trih, cc);  // Y11ᵀ
  t += t_transpose(trih, cc);  // Y22ᵀ
  t += mm3d_charge(wa_half, trih, wa_half, Rat(m) * sq(h) / Rat(d * cc), c);   // Q1
  t += mm3d_charge(wa_half, fullh, wa_half,
                   Rat(2) * Rat(m) * sq(h) / Rat(d * cc), c);                  // Q1·L21ᵀ
  t += flops_only(Rat(m, d) * Rat(h, c));                                      // update
  t += mm3d_charge(wa_half, trih, wa_half, Rat(m) * sq(h) / Rat(d * cc), c);   // Q2
  return t;
}

CostTriple analytic_pass(long long m, long long n, int c, int d, int n_o, bool split,
                         bool cubic) {
  const long long cc = static_cast<long long>(c) * c;
  CostTriple t{};
  Rat wa = Rat(m, d) * Rat(n, c);
  Rat gram_block = sq(n) / Rat(cc);

  t += t_bcast(wa, c);  // row broadcast of A
  // local partial Gram: a true Syrk when the row group is a singleton
  t += flops_only(c == 1 ? Rat(m, d) * sq(n)
                         : Rat(2) * Rat(n, c) * Rat(m, d) * Rat(n, c));
  if (cubic) {
    t += t_reduce(gram_block, d);
  } else {
    t += t_reduce(gram_block, c);
    t += t_allreduce(c == 1 ? tri_words(n) : gram_block, d / c);
  }
  t += t_bcast(gram_block, c);  // depth broadcast
  t += analytic_cfr3d(n, c, n_o, split);
  t += analytic_q_step(m, n, c, d, split && n > n_o);
  return t;
}

CostTriple analytic_pass_1d(long long m, long long n, long long p) {
  CostTriple t{};
  t += flops_only(Rat(m, p) * sq(n));  // local Syrk
  t += t_allreduce(tri_words(n), p);   // packed symmetric Gram
  t += flops_only(gamma_cholinv_step(n));
  t += flops_only(Rat(m, p) * sq(n));  // local panels of Q
  return t;
}

CostTriple final_r_transpose(long long n, int c) {
  const long long cc = static_cast<long long>(c) * c;
  return t_transpose(tri_words(n) / Rat(cc), cc);
}

}  // namespace

CostTriple analytic_mm3d(long long m, long long n, long long k, long long p) {
  const int side = static_cast<int>(1) << (ilog2_exact(p) / 3);
  if (static_cast<long long>(side) * side * side != p)
    throw std::invalid_argument("analytic_mm3d: P must be a cube of a power of two");
  const long long ss = static_cast<long long>(side) * side;
  return mm3d_charge(Rat(m * n, ss), Rat(n * k, ss), Rat(m * k, ss),
                     Rat(2 * m * n * k, p), side);
}

CostTriple analytic_cfr3d(long long n, int c, int n_o, bool skip_top) {
  if (n_o <= 0) n_o = default_base_size(static_cast<int>(n), GridShape{c, c});
  if (n % n_o != 0 || !is_pow2(n / n_o))
    throw std::invalid_argument("analytic_cfr3d: bad base size");
  const long long cc = static_cast<long long>(c) * c;
  const long long ccc = cc * c;

  CostTriple total{};
  long long instances = 1;
  for (long long s = n; s > n_o; s /= 2, instances *= 2) {
    const long long h = s / 2;
    Rat fullh = sq(h) / Rat(cc);
    Rat trih = tri_words(h) / Rat(cc);
    Rat g1 = Rat(h * h * h) / Rat(ccc);        // one triangular operand
    Rat g2 = Rat(2 * h * h * h) / Rat(ccc);    // general
    CostTriple level{};
    level += t_transpose(trih, cc);                       // Y11ᵀ
    level += mm3d_charge(fullh, trih, fullh, g1, c);      // L21 = A21·Y11ᵀ
    level += t_transpose(fullh, cc);                      // L21ᵀ
    level += mm3d_charge(fullh, fullh, fullh, g2, c);     // L21·L21ᵀ
    level += flops_only(sq(h) / Rat(cc));                 // trailing update
    const bool skip_y = skip_top && s == n;
    if (!skip_y) {
      level += mm3d_charge(fullh, trih, fullh, g1, c);    // L21·Y11
      level += mm3d_charge(trih, fullh, fullh, g1, c);    // −Y22·(L21·Y11)
    }
    total += Rat(instances) * level;
  }
  CostTriple base = t_allgather(Rat(n_o * n_o), cc);
  base += flops_only(gamma_cholinv_step(n_o));
  total += Rat(n / n_o) * base;
  return total;
}

CostTriple analytic_cost(Alg alg, long long m, long long n, int c, int d, int n_o,
                         QrVariant variant) {
  validate_qr_grid(GridShape{c, d});
  const bool split = variant == QrVariant::InvertSplit;
  if (n_o <= 0) n_o = default_base_size(static_cast<int>(n), GridShape{c, c});
  const long long p1d = static_cast<long long>(c) * c * d;

  switch (alg) {
    case Alg::Cqr1d:
      return analytic_pass_1d(m, n, p1d) + final_r_transpose(n, 1);
    case Alg::Cqr2_1d: {
      CostTriple t = analytic_pass_1d(m, n, p1d);
      t += analytic_pass_1d(m, n, p1d);
      t += flops_only(Rat(n * n * n, 3));  // local R₂·R₁
      t += final_r_transpose(n, 1);
      return t;
    }
    case Alg::Cqr3d:
      if (c != d) throw std::invalid_argument("analytic_cost: cqr-3d needs a cubic grid");
      return analytic_pass(m, n, c, d, n_o, split, true) + final_r_transpose(n, c);
    case Alg::Cqr2_3d: {
      if (c != d) throw std::invalid_argument("analytic_cost: cqr2-3d needs a cubic grid");
      CostTriple t = analytic_pass(m, n, c, d, n_o, split, true);
      t += analytic_pass(m, n, c, d, n_o, split, true);
      const long long cc = static_cast<long long>(c) * c;
      Rat trin = tri_words(n) / Rat(cc);
      t += mm3d_charge(trin, trin, trin, Rat(n * n * n, 3) / Rat(cc * c), c);
      t += final_r_transpose(n, c);
      return t;
    }
    case Alg::Cacqr:
      return analytic_pass(m, n, c, d, n_o, split, false) + final_r_transpose(n, c);
    case Alg::Cacqr2: {
      CostTriple t = analytic_pass(m, n, c, d, n_o, split, false);
      t += analytic_pass(m, n, c, d, n_o, split, false);
      const long long cc = static_cast<long long>(c) * c;
      Rat trin = tri_words(n) / Rat(cc);
      t += mm3d_charge(trin, trin, trin, Rat(n * n * n, 3) / Rat(cc * c), c);
      t += final_r_transpose(n, c);
      return t;
    }
  }
  throw std::invalid_argument("analytic_cost: unsupported algorithm tag");
}

Rat scan_beta_term(long long m, long long n, int c, int d) {
  const long long p = static_cast<long long>(c) * c * d;
  return Rat(m * n) * delta(c) / Rat(static_cast<long long>(d) * c) +
         Rat(n * n) * delta(p) / Rat(static_cast<long long>(c) * c);
}

std::vector<GridShape> valid_grids(long long p) {
  if (!is_pow2(p)) throw std::invalid_argument("valid_grids: P must be a power of two");
  std::vector<GridShape> out;
  for (long long c = 1; c * c <= p; c *= 2) {
    if (p % (c * c) != 0) continue;
    long long d = p / (c * c);
    if (d >= c) out.push_back(GridShape{static_cast<int>(c), static_cast<int>(d)});
  }
  return out;
}

GridShape tune_grid(long long m, long long n, long long p) {
  if (m < n || n < 1) throw std::invalid_argument("tune_grid: requires m >= n >= 1");
  if (!is_pow2(p)) throw std::invalid_argument("tune_grid: P must be a power of two");

  // Power-of-two roundings of the continuous optimum c = (Pn/m)^{1/3},
  // bracketed in exact integer arithmetic: k³·m vs P·n.
  auto cube_m = [&](long long k) { return static_cast<__int128>(k) * k * k * m; };
  const __int128 pn = static_cast<__int128>(p) * n;
  long long lo = 1;
  while (lo <= p && cube_m(2 * lo) <= pn) lo *= 2;
  long long hi = 1;
  while (hi <= p && cube_m(hi) < pn) hi *= 2;

  auto valid = [&](long long c) {
    return c >= 1 && p % (c * c) == 0 && p / (c * c) >= c;
  };
  std::vector<long long> cands;
  for (long long c : {lo, hi})
    if (valid(c) && (cands.empty() || cands.back() != c)) cands.push_back(c);
  if (cands.empty()) {
    for (const auto& g : valid_grids(p)) cands.push_back(g.c);
  }

  GridShape best{};
  bool have = false;
  Rat best_beta;
  for (long long c : cands) {
    GridShape g{static_cast<int>(c), static_cast<int>(p / (c * c))};
    Rat beta = scan_beta_term(m, n, g.c, g.d);
    if (!have || beta < best_beta || (beta == best_beta && g.c < best.c)) {
      best = g;
      best_beta = beta;
      have = true;
    }
  }
  if (!have) throw std::invalid_argument("tune_grid: no valid grid shape");
  return best;
}

}  // namespace gridqr
