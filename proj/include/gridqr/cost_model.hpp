#pragma once

#include <vector>

#include "gridqr/grid.hpp"
#include "gridqr/ledger.hpp"
#include "gridqr/qr_algorithms.hpp"

namespace gridqr {

enum class Alg { Cqr1d, Cqr2_1d, Cqr3d, Cqr2_3d, Cacqr, Cacqr2 };

std::string to_string(Alg a);
Alg alg_from_string(const std::string& s);

/// Closed-form critical-path cost of one mm3d over a cube of P = p ranks
/// with general m×n and n×k operands:
///   6·log₂P^{1/3}·α + 2(mn+nk+mk)δ(P^{1/3})/P^{2/3}·β + 2mnk/P·γ.
CostTriple analytic_mm3d(long long m, long long n, long long k, long long p);

/// Exact evaluation of the charged cost model for a whole algorithm:
/// closed forms for the flat steps, the unrolled level recurrence for the
/// recursive factorization. Composed step-for-step like the executed
/// algorithms (an independent code path the measured ledgers are tested
/// against). n_o <= 0 selects the default base size.
CostTriple analytic_cost(Alg alg, long long m, long long n, int c, int d, int n_o = 0,
                         QrVariant variant = QrVariant::InvertAll);

/// The recursive factorization alone (n×n over a c³ cube).
CostTriple analytic_cfr3d(long long n, int c, int n_o = 0, bool skip_top = false);

/// All valid grid shapes for P ranks: power-of-two c with c²·d = P, d ≥ c.
std::vector<GridShape> valid_grids(long long p);

/// Leading-order bandwidth term of the tunable two-pass cost on a c×d×c
/// grid: mn·δ(c)/(dc) + n²·δ(P)/c². Collapses to the 1D term n²δ(P) at c=1
/// and to mn·δ(P)/P^{2/3} on the cubic grid. Used to mark the costscan
/// minimum and to break the rounding tie in tune_grid.
Rat scan_beta_term(long long m, long long n, int c, int d);

/// Grid selection for an m×n factorization on P ranks: the two power-of-two
/// roundings of the continuous optimum c = (Pn/m)^{1/3} are candidates
/// (computed in exact integer arithmetic); validity-filtered; the analytic
/// bandwidth term decides between them, ties toward smaller c (less memory).
GridShape tune_grid(long long m, long long n, long long p);

}  // namespace gridqr
