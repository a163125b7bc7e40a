#pragma once

#include <string>
#include <vector>

namespace gridqr {

/// A c×d×c virtual processor grid: x and z run over [0,c), y over [0,d),
/// with P = c²·d ranks and d ≥ c ≥ 1.
struct GridShape {
  int c = 1;
  int d = 1;
  int p() const { return c * c * d; }
  friend bool operator==(const GridShape& a, const GridShape& b) {
    return a.c == b.c && a.d == b.d;
  }
};

struct RankCoord {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const RankCoord& a, const RankCoord& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }
};

/// Validates c ≥ 1, d ≥ c. Throws std::invalid_argument otherwise.
GridShape build_grid(int c, int d);

bool is_pow2(long long v);
/// log₂ of a power of two; throws std::invalid_argument otherwise.
int ilog2_exact(long long v);

bool valid_coord(const GridShape& g, const RankCoord& r);
/// The documented linear rank id: x + c·(y + d·z).
int rank_id(const GridShape& g, const RankCoord& r);
RankCoord coord_of(const GridShape& g, int id);

enum class CommKind { Row, Column, Depth, Slice, YContiguous, YStrided, Subcube, World };

std::string to_string(CommKind k);

/// An ordered rank subgroup. Members are listed in a deterministic canonical
/// order: ascending in the varying coordinate, and for multi-dimensional
/// kinds ascending x fastest, then y, then z.
struct Communicator {
  CommKind kind = CommKind::World;
  std::vector<RankCoord> members;

  int size() const { return static_cast<int>(members.size()); }
  bool contains(const RankCoord& r) const;
  /// Index of a member; throws std::invalid_argument if absent.
  int index_of(const RankCoord& r) const;
};

/// The subgroup of `kind` containing `me`:
///   Row         Π[:,y,z]                           (size c)
///   Column      Π[x,:,z]                           (size d)
///   Depth       Π[x,y,:]                           (size c)
///   Slice       Π[:,:,z]                           (size c·d)
///   YContiguous Π[x, c⌊y/c⌋ .. c⌊y/c⌋+c−1, z]      (size c, needs c|d)
///   YStrided    Π[x, y mod c :: c, z]              (size d/c, needs c|d)
///   Subcube     the c×c×c cube containing me       (size c³, needs c|d)
///   World       everything                         (size P)
Communicator subcomm(const GridShape& g, const RankCoord& me, CommKind kind);

/// Every communicator of a partitioning kind, deterministically ordered.
/// (Row, Column, Depth, Slice, YContiguous, YStrided, Subcube, World all
/// partition the grid.)
std::vector<Communicator> partition(const GridShape& g, CommKind kind);

/// Base y coordinates of the d/c disjoint c×c×c subcubes.
std::vector<int> subcube_bases(const GridShape& g);

}  // namespace gridqr
