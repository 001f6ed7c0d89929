#include "gossip_age/isoperimetry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gossip_age/errors.hpp"

namespace gossip_age::bounds {
namespace {

constexpr std::size_t kFullSweepMaxSide = 5;
constexpr std::size_t kRootedMaxSide = 8;
constexpr std::size_t kRootedMaxSize = 12;

/// Shift-based neighbor maps for an L x L torus packed row-major into a
/// 64-bit mask (node r*L + c at bit r*L + c).
class TorusBits {
 public:
  explicit TorusBits(std::size_t side) : side_(side), n_(side * side) {
    full_ = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    for (std::size_t r = 0; r < side; ++r) {
      first_col_ |= std::uint64_t{1} << (r * side);
      last_col_ |= std::uint64_t{1} << (r * side + side - 1);
    }
  }

  std::uint64_t full() const { return full_; }

  std::uint64_t right(std::uint64_t m) const {
    return ((m & ~last_col_) << 1) | ((m & last_col_) >> (side_ - 1));
  }
  std::uint64_t left(std::uint64_t m) const {
    return ((m & ~first_col_) >> 1) | ((m & first_col_) << (side_ - 1));
  }
  std::uint64_t down(std::uint64_t m) const {
    return ((m << side_) | (m >> (n_ - side_))) & full_;
  }
  std::uint64_t up(std::uint64_t m) const {
    return ((m >> side_) | (m << (n_ - side_))) & full_;
  }
  std::uint64_t neighbors(std::uint64_t m) const {
    return right(m) | left(m) | up(m) | down(m);
  }

  /// E(S) = 4|S| - 2 * (internal edges); valid for side >= 3.
  std::size_t incoming_edges(std::uint64_t m) const {
    const int internal = std::popcount(m & right(m)) + std::popcount(m & down(m));
    return static_cast<std::size_t>(4 * std::popcount(m) - 2 * internal);
  }

  bool connected(std::uint64_t m) const {
    if (m == 0) return false;
    std::uint64_t reached = m & (~m + 1);
    while (true) {
      const std::uint64_t next = (reached | neighbors(reached)) & m;
      if (next == reached) break;
      reached = next;
    }
    return reached == m;
  }

 private:
  std::size_t side_;
  std::size_t n_;
  std::uint64_t full_ = 0;
  std::uint64_t first_col_ = 0;
  std::uint64_t last_col_ = 0;
};

void require_torus_side(std::size_t side) {
  if (side < 3) throw PreconditionError(fmt::format("torus side must be >= 3, got {}", side));
}

void require_size(std::size_t n, std::size_t j) {
  if (j < 1 || j >= n) {
    throw PreconditionError(fmt::format("subset size {} outside [1, {}]", j, n - 1));
  }
}

/// Enumerates each connected set containing node 0 exactly once by growing
/// from an "untried" frontier and never revisiting a cell once seen.
class RootedSearch {
 public:
  RootedSearch(const TorusBits& bits, std::size_t target) : bits_(bits), target_(target) {}

  BoundaryMinimum run() {
    grow(0, 1, 1, 0);
    return best_;
  }

 private:
  void grow(std::uint64_t current, std::uint64_t untried, std::uint64_t seen, std::size_t size) {
    while (untried != 0) {
      const std::uint64_t u = untried & (~untried + 1);
      untried &= ~u;
      const std::uint64_t next = current | u;
      if (size + 1 == target_) {
        const std::size_t e = bits_.incoming_edges(next);
        if (e < best_.min_edges || (e == best_.min_edges && next < best_.witness)) {
          best_ = {e, next};
        }
      } else {
        const std::uint64_t fresh = bits_.neighbors(u) & ~seen;
        grow(next, untried | fresh, seen | fresh, size + 1);
      }
    }
  }

  const TorusBits& bits_;
  std::size_t target_;
  BoundaryMinimum best_{std::numeric_limits<std::size_t>::max(), 0};
};

}  // namespace

std::size_t isqrt(std::size_t x) {
  if (x < 2) return x;
  std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(x)));
  // divisions instead of squares keep this exact near 2^64
  while (r > x / r) --r;
  while (r + 1 <= x / (r + 1)) ++r;
  return r;
}

std::size_t spiral_edge_count(std::size_t j) {
  // ceil(2 sqrt(j)) = ceil(sqrt(4j))
  const std::size_t s = isqrt(4 * j);
  return 2 * (s * s == 4 * j ? s : s + 1);
}

EdgePartition edge_partition(const GossipNetwork& net, const NodeSubset& s) {
  const TopologyTag& tag = net.tag();
  const bool grid2d = (tag.kind == TopologyKind::torus_grid && tag.dimension == 2) ||
                      tag.kind == TopologyKind::open_grid;
  if (!grid2d) throw PreconditionError("edge_partition requires a two-dimensional grid");
  if (s.empty() || s.size() >= net.size()) {
    throw PreconditionError("edge_partition requires a nonempty proper subset");
  }
  if (!is_connected_subset(net, s)) {
    throw PreconditionError(fmt::format("subset {} is not connected", s.to_hex()));
  }
  EdgePartition p;
  const NodeSubset outside = neighbors_of_set(net, s);
  outside.for_each([&](NodeId i) {
    std::size_t edges = 0;
    for (const Link& l : net.out_links(i)) {
      if (s.contains(l.target)) ++edges;
    }
    switch (edges) {
      case 1: ++p.a; break;
      case 2: ++p.b; break;
      case 3: ++p.c; break;
      case 4: ++p.d; break;
      default: GOSSIP_AGE_ASSERT(false, "grid neighbor with more than four links");
    }
    p.e_total += edges;
  });
  return p;
}

NodeSubset spiral_subset(std::size_t side, std::size_t j) {
  require_torus_side(side);
  if (j < 1 || j > side * side) {
    throw PreconditionError(fmt::format("spiral size {} outside [1, {}]", j, side * side));
  }
  std::vector<std::pair<long, long>> cells;
  cells.reserve(j);
  long r = 0, c = 0;
  constexpr long dr[4] = {0, 1, 0, -1};
  constexpr long dc[4] = {1, 0, -1, 0};
  cells.emplace_back(r, c);
  for (long run = 1, dir = 0; cells.size() < j; ++run) {
    for (int rep = 0; rep < 2 && cells.size() < j; ++rep, dir = (dir + 1) % 4) {
      for (long k = 0; k < run && cells.size() < j; ++k) {
        r += dr[dir];
        c += dc[dir];
        cells.emplace_back(r, c);
      }
    }
  }
  long rmin = 0, rmax = 0, cmin = 0, cmax = 0;
  for (const auto& [cr, cc] : cells) {
    rmin = std::min(rmin, cr);
    rmax = std::max(rmax, cr);
    cmin = std::min(cmin, cc);
    cmax = std::max(cmax, cc);
  }
  const auto L = static_cast<long>(side);
  if (rmax - rmin + 1 >= L || cmax - cmin + 1 >= L) {
    throw PreconditionError(fmt::format(
        "a {}-cell spiral spans {}x{} and would wrap around a side-{} torus", j,
        rmax - rmin + 1, cmax - cmin + 1, side));
  }
  NodeSubset out(side * side);
  for (const auto& [cr, cc] : cells) {
    const auto row = static_cast<std::size_t>(((cr % L) + L) % L);
    const auto col = static_cast<std::size_t>(((cc % L) + L) % L);
    out.insert(static_cast<NodeId>(row * side + col));
  }
  return out;
}

std::vector<BoundaryMinimum> min_boundary_profile(std::size_t side) {
  require_torus_side(side);
  if (side > kFullSweepMaxSide) {
    throw CapacityError(fmt::format(
        "full isoperimetric sweep is limited to side <= {}; got {}", kFullSweepMaxSide, side));
  }
  const TorusBits bits(side);
  const std::size_t n = side * side;
  std::vector<BoundaryMinimum> best(n - 1, {std::numeric_limits<std::size_t>::max(), 0});
  for (std::uint64_t m = 1; m < bits.full(); ++m) {
    const std::size_t j = static_cast<std::size_t>(std::popcount(m));
    const std::size_t e = bits.incoming_edges(m);
    // ascending masks: the first minimizer found is the smallest
    if (e < best[j - 1].min_edges && bits.connected(m)) best[j - 1] = {e, m};
  }
  return best;
}

BoundaryMinimum min_boundary_bruteforce(std::size_t side, std::size_t j) {
  require_torus_side(side);
  const std::size_t n = side * side;
  require_size(n, j);
  const TorusBits bits(side);
  if (side <= kFullSweepMaxSide) {
    BoundaryMinimum best{std::numeric_limits<std::size_t>::max(), 0};
    for (std::uint64_t m = 1; m < bits.full(); ++m) {
      if (static_cast<std::size_t>(std::popcount(m)) != j) continue;
      const std::size_t e = bits.incoming_edges(m);
      if (e < best.min_edges && bits.connected(m)) best = {e, m};
    }
    return best;
  }
  if (side <= kRootedMaxSide && j <= kRootedMaxSize) {
    return RootedSearch(bits, j).run();
  }
  throw CapacityError(fmt::format(
      "exhaustive search needs side <= {}, or side <= {} with j <= {}; got side {}, j {}",
      kFullSweepMaxSide, kRootedMaxSide, kRootedMaxSize, side, j));
}

std::size_t grid_E_lower_bound(std::size_t n, std::size_t j) {
  if (n < 2) throw PreconditionError("grid_E_lower_bound needs n >= 2");
  require_size(n, j);
  if (4 * j <= 3 * n) return 2 * isqrt(j);
  return 4 * isqrt(n - j);
}

}  // namespace gossip_age::bounds
