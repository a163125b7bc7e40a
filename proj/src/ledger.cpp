#include "gridqr/ledger.hpp"

namespace gridqr {

CostTriple t_bcast(const Rat& words, long long p) {
  return {Rat(2 * ilog2_exact(p)), Rat(2) * words * delta(p), Rat(0)};
}

CostTriple t_reduce(const Rat& words, long long p) {
  return {Rat(ilog2_exact(p)), words * delta(p), Rat(0)};
}

CostTriple t_allreduce(const Rat& words, long long p) {
  return {Rat(2 * ilog2_exact(p)), Rat(2) * words * delta(p), Rat(0)};
}

CostTriple t_allgather(const Rat& total_words, long long p) {
  return {Rat(ilog2_exact(p)), total_words * delta(p), Rat(0)};
}

CostTriple t_transpose(const Rat& words, long long p) {
  return {delta(p), words * delta(p), Rat(0)};
}

Rat tri_words(long long x) { return Rat(x * (x + 1), 2); }

}  // namespace gridqr
