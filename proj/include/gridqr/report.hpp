#pragma once

#include <cstdint>
#include <string>

#include "gridqr/cost_model.hpp"
#include "gridqr/ledger.hpp"

namespace gridqr {

/// Machine-readable record of one factorization run. `match` compares the
/// measured (α, β) against the analytic model by exact rational comparison;
/// wall_time_ms is the only nondeterministic field.
struct RunReport {
  std::string algorithm;
  long long m = 0;
  long long n = 0;
  int c = 1;
  int d = 1;
  int n_o = 0;
  std::string variant;
  uint64_t seed = 0;
  double cond = 1.0;
  double orthogonality_error = 0.0;
  double residual = 0.0;
  CostTriple ledger;
  CostTriple analytic;
  bool match = false;
  double wall_time_ms = 0.0;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

}  // namespace gridqr
