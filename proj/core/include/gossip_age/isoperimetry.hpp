#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gossip_age/node_subset.hpp"
#include "gossip_age/topology.hpp"

namespace gossip_age::bounds {

/// Neighbors of S split by how many of their links point into S.
/// e_total = a + 2b + 3c + 4d is the number of links entering S.
struct EdgePartition {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;
  std::size_t d = 0;
  std::size_t e_total = 0;

  std::size_t neighbor_count() const { return a + b + c + d; }
  friend bool operator==(const EdgePartition&, const EdgePartition&) = default;
};

/// Partition of N(S) on a 2D grid (torus, or the open grid used for the
/// bounded-grid figures). S must be nonempty and proper.
EdgePartition edge_partition(const GossipNetwork& net, const NodeSubset& s);

/// The first j cells of a square spiral on the L x L torus, starting at node
/// (0, 0) and turning right, down, left, up with run lengths 1,1,2,2,3,3,...
/// (negative coordinates wrap). Throws PreconditionError when the spiral's
/// bounding box reaches the side length, i.e. when it would touch itself
/// around the torus.
NodeSubset spiral_subset(std::size_t side, std::size_t j);

/// 2 * ceil(2 * sqrt(j)), the incoming-edge count of a j-cell spiral.
std::size_t spiral_edge_count(std::size_t j);

/// floor(sqrt(x)) computed exactly on integers.
std::size_t isqrt(std::size_t x);

struct BoundaryMinimum {
  std::size_t min_edges = 0;
  /// Minimizer with the smallest bitmask (among sets containing node 0 when
  /// the rooted search is used).
  std::uint64_t witness = 0;
};

/// Exhaustive minimum of E(S) over connected size-j subsets of the L x L
/// torus. Full enumeration for L <= 5; for 5 < L <= 8 a rooted search over
/// sets containing node 0 (valid by translation symmetry) for j <= 12.
/// Throws CapacityError outside those guards.
BoundaryMinimum min_boundary_bruteforce(std::size_t side, std::size_t j);

/// min_boundary_bruteforce for every j in [1, L^2 - 1] in a single sweep;
/// index j - 1. Requires L <= 5.
std::vector<BoundaryMinimum> min_boundary_profile(std::size_t side);

/// Lower bound on E(S) for a connected size-j subset of an n-node torus:
/// 2 floor(sqrt(j)) for j <= 3n/4, else 4 floor(sqrt(n - j)).
std::size_t grid_E_lower_bound(std::size_t n, std::size_t j);

}  // namespace gossip_age::bounds
