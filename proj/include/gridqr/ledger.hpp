#pragma once

#include <string>
#include <vector>

#include "gridqr/rational.hpp"

namespace gridqr {

/// (messages, words, flops) in α/β/γ units.
struct CostTriple {
  Rat alpha;
  Rat beta;
  Rat gamma;

  CostTriple& operator+=(const CostTriple& o) {
    alpha += o.alpha;
    beta += o.beta;
    gamma += o.gamma;
    return *this;
  }
  friend CostTriple operator+(CostTriple a, const CostTriple& b) { return a += b; }
  friend CostTriple operator*(const Rat& s, const CostTriple& t) {
    return {s * t.alpha, s * t.beta, s * t.gamma};
  }
  friend bool operator==(const CostTriple& a, const CostTriple& b) {
    return a.alpha == b.alpha && a.beta == b.beta && a.gamma == b.gamma;
  }
  std::string str() const {
    return "(" + alpha.str() + "a, " + beta.str() + "b, " + gamma.str() + "g)";
  }
};

/// Accumulated critical-path cost of one run, with an optional per-phase
/// breakdown. Charging conventions:
///   - one collective over a communicator charges its closed formula once,
///     never per member;
///   - logically concurrent invocations over disjoint symmetric groups (all
///     row bcasts of a step, the d/c subcube factorizations, the pairwise
///     exchanges of a distributed transpose) charge the maximum over groups,
///     which for symmetric groups is the one-group formula, charged once by
///     the grouped operations in collectives/layout;
///   - sequential composition adds.
/// All components are exact rationals and monotonically nondecreasing.
class CostLedger {
 public:
  void charge(const std::string& label, const CostTriple& cost) {
    if (cost.alpha < Rat(0) || cost.beta < Rat(0) || cost.gamma < Rat(0))
      throw std::invalid_argument("CostLedger: negative charge");
    total_ += cost;
    phases_.push_back({label, cost});
  }
  void charge_flops(const std::string& label, const Rat& f) {
    charge(label, CostTriple{Rat(0), Rat(0), f});
  }

  const CostTriple& total() const { return total_; }
  const std::vector<std::pair<std::string, CostTriple>>& phases() const { return phases_; }

 private:
  CostTriple total_;
  std::vector<std::pair<std::string, CostTriple>> phases_;
};

/// δ(x): 0 for x ≤ 1, 1 for x > 1. Zeroes every communication charge on
/// singleton groups, which is what makes the degenerate grid cases exact.
inline Rat delta(long long x) { return x > 1 ? Rat(1) : Rat(0); }

int ilog2_exact(long long v);  // from grid.hpp; redeclared to avoid the include

/// Butterfly collective costs over p ranks moving `words` per rank
/// (total words for allgather). Communicator sizes must be powers of two.
CostTriple t_bcast(const Rat& words, long long p);
CostTriple t_reduce(const Rat& words, long long p);
CostTriple t_allreduce(const Rat& words, long long p);
CostTriple t_allgather(const Rat& total_words, long long p);
/// Pairwise exchange across a slice of p ranks: δ(p)·(α + words·β).
CostTriple t_transpose(const Rat& words, long long p);

/// Packed triangular payload: x(x+1)/2 words for a triangular matrix of
/// dimension x.
Rat tri_words(long long x);

}  // namespace gridqr
