#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gridqr/dense_matrix.hpp"
#include "gridqr/grid.hpp"
#include "gridqr/ledger.hpp"

namespace gridqr {

/// One DenseMatrix buffer per rank of a grid.
struct BlockMap {
  GridShape grid;
  std::vector<DenseMatrix> blocks;

  BlockMap() = default;
  explicit BlockMap(const GridShape& g) : grid(g), blocks(g.p()) {}
  DenseMatrix& at(const RankCoord& r) { return blocks[rank_id(grid, r)]; }
  const DenseMatrix& at(const RankCoord& r) const { return blocks[rank_id(grid, r)]; }
};

namespace collectives {

/// Collectives execute as whole-communicator array transformations in one
/// deterministic step; only the butterfly cost formula is charged, the
/// schedule itself is never simulated. `charged_words` overrides the actual
/// buffer word count (packed triangular payloads and per-rank model charges);
/// by default the buffers' own sizes are charged.
///
/// Reductions sum left-to-right in communicator canonical order, so results
/// are bitwise reproducible. Their computational cost is not charged.

void bcast(BlockMap& data, const Communicator& comm, const RankCoord& root,
           CostLedger& ledger, std::optional<Rat> charged_words = std::nullopt);

void reduce(BlockMap& data, const Communicator& comm, const RankCoord& root,
            CostLedger& ledger, std::optional<Rat> charged_words = std::nullopt);

void allreduce(BlockMap& data, const Communicator& comm, CostLedger& ledger,
               std::optional<Rat> charged_words = std::nullopt);

/// Every member receives the concatenation (list) of all members' buffers in
/// canonical order; returned once since the copies are identical. Charges
/// log₂p·α + total·δ(p)·β with total the sum of gathered words.
std::vector<DenseMatrix> allgather(const BlockMap& data, const Communicator& comm,
                                   CostLedger& ledger,
                                   std::optional<Rat> charged_total = std::nullopt);

/// Pairwise buffer swap. Self-partners are a no-op with zero charge; a
/// distinct pair charges δ(2)·(α + words·β).
void transpose_swap(BlockMap& data, const RankCoord& a, const RankCoord& b,
                    CostLedger& ledger, std::optional<Rat> charged_words = std::nullopt);

/// Grouped variants: run the collective over every communicator of a
/// concurrent partition and charge the formula once (the max rule for
/// symmetric disjoint groups). Group shapes must be uniform.
using RootRule = RankCoord (*)(const Communicator&);

void bcast_groups(BlockMap& data, std::span<const Communicator> groups,
                  const std::vector<RankCoord>& roots, CostLedger& ledger,
                  std::optional<Rat> charged_words = std::nullopt);

void reduce_groups(BlockMap& data, std::span<const Communicator> groups,
                   const std::vector<RankCoord>& roots, CostLedger& ledger,
                   std::optional<Rat> charged_words = std::nullopt);

void allreduce_groups(BlockMap& data, std::span<const Communicator> groups,
                      CostLedger& ledger,
                      std::optional<Rat> charged_words = std::nullopt);

}  // namespace collectives
}  // namespace gridqr
