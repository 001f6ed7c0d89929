#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gossip_age/node_subset.hpp"
#include "gossip_age/topology.hpp"

namespace gossip_age {

struct SolverLimits {
  std::size_t max_nodes = 16;
};

/// Every connected induced subset of a network with at most `limits.max_nodes`
/// (and never more than 63) nodes, as bitmasks grouped by increasing size and
/// ascending mask value within a size.
std::vector<std::uint64_t> enumerate_connected_masks(const GossipNetwork& net,
                                                     const SolverLimits& limits = {});
std::vector<NodeSubset> enumerate_connected_subsets(const GossipNetwork& net,
                                                    const SolverLimits& limits = {});

/// Exact v_S for every connected subset S, indexed by bitmask.
class AgeTable {
 public:
  AgeTable(std::size_t n, std::uint64_t network_id);

  std::size_t node_count() const { return n_; }
  std::uint64_t network_id() const { return network_id_; }

  bool contains(std::uint64_t mask) const;
  bool contains(const NodeSubset& s) const { return contains(s.to_mask()); }
  /// Throws PreconditionError for subsets that are not in the table.
  double age(std::uint64_t mask) const;
  double age(const NodeSubset& s) const { return age(s.to_mask()); }

  /// Connected masks in table order (decreasing size, ascending mask).
  std::span<const std::uint64_t> subsets() const { return order_; }

  /// Mean, min and max of v_{i} over singletons.
  double singleton_mean() const;
  double singleton_min() const;
  double singleton_max() const;

  void set(std::uint64_t mask, double value);

  /// CSV with header comment, columns subset (hex mask), size, v_S.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t n_;
  std::uint64_t network_id_;
  std::vector<double> ages_;  // NaN for subsets outside the table
  std::vector<std::uint64_t> order_;
};

/// Solves the age recursion
///   v_S = (lambda_e + sum_{i in N(S)} lambda_i(S) v_{S+i}) / (lambda_0(S) + sum lambda_i(S))
/// from the full network (v = lambda_e / lambda_0(full)) down to singletons.
/// Each equation only references one-larger sets, so a single pass in
/// decreasing size order suffices.
AgeTable solve_version_ages(const GossipNetwork& net, const SolverLimits& limits = {});

/// Upper bound on v_S from the rate-minimal neighbor and age-maximal
/// expansion. Rejects S without neighbors (the full network).
double lemma1_upper_bound(const GossipNetwork& net, const NodeSubset& s, const AgeTable& table);

/// Mirror of lemma1_upper_bound with the rate-maximal neighbor and the
/// age-minimal expansion; a lower bound on v_S.
double lemma2_lower_bound(const GossipNetwork& net, const NodeSubset& s, const AgeTable& table);

/// Ages of the complete graph by subset size, v_by_size[j-1] = v_j,
/// using the symmetric recursion with lambda_i(S) = j lambda/(n-1),
/// |N(S)| = n - j and lambda_0(S) = j lambda / n. O(n).
std::vector<double> complete_graph_oracle(std::size_t n, double lambda_e, double lambda);

}  // namespace gossip_age
