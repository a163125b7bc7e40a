#include "gridqr/collectives.hpp"

#include <stdexcept>

namespace gridqr::collectives {

namespace {

Rat block_words(const DenseMatrix& m) {
  return Rat(static_cast<long long>(m.rows) * m.cols);
}

void check_uniform_shapes(const BlockMap& data, const Communicator& comm, const char* who) {
  const DenseMatrix& first = data.at(comm.members.front());
  for (const auto& r : comm.members)
    if (!data.at(r).same_shape(first))
      throw std::invalid_argument(std::string(who) + ": shape mismatch among members");
}

DenseMatrix sum_members(const BlockMap& data, const Communicator& comm) {
  DenseMatrix acc = data.at(comm.members.front());
  for (size_t i = 1; i < comm.members.size(); ++i) {
    const DenseMatrix& b = data.at(comm.members[i]);
    for (size_t k = 0; k < acc.data.size(); ++k) acc.data[k] += b.data[k];
  }
  return acc;
}

void bcast_data(BlockMap& data, const Communicator& comm, const RankCoord& root) {
  if (!comm.contains(root))
    throw std::invalid_argument("bcast: root not in communicator");
  const DenseMatrix src = data.at(root);
  for (const auto& r : comm.members) data.at(r) = src;
}

}  // namespace

void bcast(BlockMap& data, const Communicator& comm, const RankCoord& root,
           CostLedger& ledger, std::optional<Rat> charged_words) {
  Rat w = charged_words.value_or(block_words(data.at(root)));
  bcast_data(data, comm, root);
  ledger.charge("bcast[" + to_string(comm.kind) + "]", t_bcast(w, comm.size()));
}

void reduce(BlockMap& data, const Communicator& comm, const RankCoord& root,
            CostLedger& ledger, std::optional<Rat> charged_words) {
  if (!comm.contains(root))
    throw std::invalid_argument("reduce: root not in communicator");
  check_uniform_shapes(data, comm, "reduce");
  Rat w = charged_words.value_or(block_words(data.at(root)));
  data.at(root) = sum_members(data, comm);
  ledger.charge("reduce[" + to_string(comm.kind) + "]", t_reduce(w, comm.size()));
}

void allreduce(BlockMap& data, const Communicator& comm, CostLedger& ledger,
               std::optional<Rat> charged_words) {
  check_uniform_shapes(data, comm, "allreduce");
  Rat w = charged_words.value_or(block_words(data.at(comm.members.front())));
  DenseMatrix s = sum_members(data, comm);
  for (const auto& r : comm.members) data.at(r) = s;
  ledger.charge("allreduce[" + to_string(comm.kind) + "]", t_allreduce(w, comm.size()));
}

std::vector<DenseMatrix> allgather(const BlockMap& data, const Communicator& comm,
                                   CostLedger& ledger, std::optional<Rat> charged_total) {
  std::vector<DenseMatrix> out;
  out.reserve(comm.members.size());
  Rat total(0);
  for (const auto& r : comm.members) {
    total += block_words(data.at(r));
    out.push_back(data.at(r));
  }
  ledger.charge("allgather[" + to_string(comm.kind) + "]",
                t_allgather(charged_total.value_or(total), comm.size()));
  return out;
}

void transpose_swap(BlockMap& data, const RankCoord& a, const RankCoord& b,
                    CostLedger& ledger, std::optional<Rat> charged_words) {
  if (a == b) {
    ledger.charge("transpose-swap[self]", t_transpose(Rat(0), 1));
    return;
  }
  if (!data.at(a).same_shape(data.at(b)))
    throw std::invalid_argument("transpose_swap: partner shape mismatch");
  Rat w = charged_words.value_or(block_words(data.at(a)));
  std::swap(data.at(a), data.at(b));
  ledger.charge("transpose-swap", t_transpose(w, 2));
}

void bcast_groups(BlockMap& data, std::span<const Communicator> groups,
                  const std::vector<RankCoord>& roots, CostLedger& ledger,
                  std::optional<Rat> charged_words) {
  if (groups.empty()) return;
  if (roots.size() != groups.size())
    throw std::invalid_argument("bcast_groups: one root per group required");
  Rat w = charged_words.value_or(block_words(data.at(roots.front())));
  for (size_t i = 0; i < groups.size(); ++i) bcast_data(data, groups[i], roots[i]);
  ledger.charge("bcast[" + to_string(groups.front().kind) + "]",
                t_bcast(w, groups.front().size()));
}

void reduce_groups(BlockMap& data, std::span<const Communicator> groups,
                   const std::vector<RankCoord>& roots, CostLedger& ledger,
                   std::optional<Rat> charged_words) {
  if (groups.empty()) return;
  if (roots.size() != groups.size())
    throw std::invalid_argument("reduce_groups: one root per group required");
  Rat w = charged_words.value_or(block_words(data.at(roots.front())));
  for (size_t i = 0; i < groups.size(); ++i) {
    check_uniform_shapes(data, groups[i], "reduce");
    data.at(roots[i]) = sum_members(data, groups[i]);
  }
  ledger.charge("reduce[" + to_string(groups.front().kind) + "]",
                t_reduce(w, groups.front().size()));
}

void allreduce_groups(BlockMap& data, std::span<const Communicator> groups,
                      CostLedger& ledger, std::optional<Rat> charged_words) {
  if (groups.empty()) return;
  Rat w =
      charged_words.value_or(block_words(data.at(groups.front().members.front())));
  for (const auto& g : groups) {
    check_uniform_shapes(data, g, "allreduce");
    DenseMatrix s = sum_members(data, g);
    for (const auto& r : g.members) data.at(r) = s;
  }
  ledger.charge("allreduce[" + to_string(groups.front().kind) + "]",
                t_allreduce(w, groups.front().size()));
}

}  // namespace gridqr::collectives
