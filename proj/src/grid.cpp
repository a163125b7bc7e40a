#include "gridqr/grid.hpp"

#include <bit>
#include <stdexcept>

namespace gridqr {

GridShape build_grid(int c, int d) {
  if (c <= 0 || d <= 0)
    throw std::invalid_argument("build_grid: dimensions must be positive");
  if (d < c) throw std::invalid_argument("build_grid: requires d >= c");
  return GridShape{c, d};
}

bool is_pow2(long long v) { return v > 0 && std::has_single_bit(static_cast<unsigned long long>(v)); }

int ilog2_exact(long long v) {
  if (!is_pow2(v)) throw std::invalid_argument("ilog2_exact: not a power of two");
  int l = 0;
  while (v > 1) { v >>= 1; ++l; }
  return l;
}

bool valid_coord(const GridShape& g, const RankCoord& r) {
  return r.x >= 0 && r.x < g.c && r.y >= 0 && r.y < g.d && r.z >= 0 && r.z < g.c;
}

int rank_id(const GridShape& g, const RankCoord& r) {
  return r.x + g.c * (r.y + g.d * r.z);
}

RankCoord coord_of(const GridShape& g, int id) {
  RankCoord r;
  r.x = id % g.c;
  r.y = (id / g.c) % g.d;
  r.z = id / (g.c * g.d);
  return r;
}

std::string to_string(CommKind k) {
  switch (k) {
    case CommKind::Row: return "row";
    case CommKind::Column: return "column";
    case CommKind::Depth: return "depth";
    case CommKind::Slice: return "slice";
    case CommKind::YContiguous: return "y-contiguous";
    case CommKind::YStrided: return "y-strided";
    case CommKind::Subcube: return "subcube";
    case CommKind::World: return "world";
  }
  return "?";
}

bool Communicator::contains(const RankCoord& r) const {
  for (const auto& m : members)
    if (m == r) return true;
  return false;
}

int Communicator::index_of(const RankCoord& r) const {
  for (size_t i = 0; i < members.size(); ++i)
    if (members[i] == r) return static_cast<int>(i);
  throw std::invalid_argument("Communicator::index_of: rank not a member");
}

namespace {
void require_c_divides_d(const GridShape& g, CommKind kind) {
  if (g.d % g.c != 0)
    throw std::invalid_argument("subcomm: " + to_string(kind) +
                                " groups require c | d (grid shape error)");
}
}  // namespace

Communicator subcomm(const GridShape& g, const RankCoord& me, CommKind kind) {
  if (!valid_coord(g, me)) throw std::invalid_argument("subcomm: coordinate outside grid");
  Communicator comm;
  comm.kind = kind;
  switch (kind) {
    case CommKind::Row:
      for (int x = 0; x < g.c; ++x) comm.members.push_back({x, me.y, me.z});
      break;
    case CommKind::Column:
      for (int y = 0; y < g.d; ++y) comm.members.push_back({me.x, y, me.z});
      break;
    case CommKind::Depth:
      for (int z = 0; z < g.c; ++z) comm.members.push_back({me.x, me.y, z});
      break;
    case CommKind::Slice:
      for (int y = 0; y < g.d; ++y)
        for (int x = 0; x < g.c; ++x) comm.members.push_back({x, y, me.z});
      break;
    case CommKind::YContiguous: {
      require_c_divides_d(g, kind);
      const int y0 = g.c * (me.y / g.c);
      for (int y = y0; y < y0 + g.c; ++y) comm.members.push_back({me.x, y, me.z});
      break;
    }
    case CommKind::YStrided: {
      require_c_divides_d(g, kind);
      for (int y = me.y % g.c; y < g.d; y += g.c) comm.members.push_back({me.x, y, me.z});
      break;
    }
    case CommKind::Subcube: {
      require_c_divides_d(g, kind);
      const int y0 = g.c * (me.y / g.c);
      for (int z = 0; z < g.c; ++z)
        for (int y = y0; y < y0 + g.c; ++y)
          for (int x = 0; x < g.c; ++x) comm.members.push_back({x, y, z});
      break;
    }
    case CommKind::World:
      for (int z = 0; z < g.c; ++z)
        for (int y = 0; y < g.d; ++y)
          for (int x = 0; x < g.c; ++x) comm.members.push_back({x, y, z});
      break;
  }
  return comm;
}

std::vector<Communicator> partition(const GridShape& g, CommKind kind) {
  std::vector<Communicator> out;
  auto add_unique = [&](const RankCoord& me) {
    Communicator c = subcomm(g, me, kind);
    if (c.members.front() == me) out.push_back(std::move(c));
  };
  // A communicator is emitted once, keyed by its first (lowest) member.
  for (int z = 0; z < g.c; ++z)
    for (int y = 0; y < g.d; ++y)
      for (int x = 0; x < g.c; ++x) add_unique({x, y, z});
  return out;
}

std::vector<int> subcube_bases(const GridShape& g) {
  if (g.d % g.c != 0)
    throw std::invalid_argument("subcube_bases: requires c | d (grid shape error)");
  std::vector<int> bases;
  for (int y0 = 0; y0 < g.d; y0 += g.c) bases.push_back(y0);
  return bases;
}

}  // namespace gridqr
